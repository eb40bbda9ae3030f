#include "mlnet/error.hpp"

namespace mlnet {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::UnknownLayer: return "unknown_layer";
    case ErrorCode::UnknownNode: return "unknown_node";
    case ErrorCode::SelfExposure: return "self_exposure";
    case ErrorCode::NegativeAmount: return "negative_amount";
    case ErrorCode::NonFinite: return "non_finite";
    case ErrorCode::EmptyNetwork: return "empty_network";
    case ErrorCode::MismatchedNodes: return "mismatched_nodes";
    case ErrorCode::MismatchedBanks: return "mismatched_banks";
    case ErrorCode::CapitalsIncomplete: return "capitals_incomplete";
    case ErrorCode::NonConvergence: return "non_convergence";
    case ErrorCode::ZeroMatrix: return "zero_matrix";
    case ErrorCode::DivergentAttenuation: return "divergent_attenuation";
    case ErrorCode::Unstabilizable: return "unstabilizable";
    case ErrorCode::FixedPointDivergence: return "fixed_point_divergence";
    case ErrorCode::UnstableStep: return "unstable_step";
    case ErrorCode::ConstantFactor: return "constant_factor";
    case ErrorCode::Underdetermined: return "underdetermined";
    case ErrorCode::SolverFailure: return "solver_failure";
    case ErrorCode::UnsupportedFormat: return "unsupported_format";
    case ErrorCode::IoError: return "io_error";
    case ErrorCode::OutputExists: return "output_exists";
  }
  return "unknown";
}

}  // namespace mlnet

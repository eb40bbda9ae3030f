// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance and runtime budget is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "mlnet/centrality.hpp"
#include "mlnet/cli.hpp"
#include "mlnet/dynamics.hpp"
#include "mlnet/error.hpp"
#include "mlnet/factors.hpp"
#include "mlnet/ingest.hpp"
#include "mlnet/surcharge.hpp"
#include "mlnet/testbed.hpp"
#include "path_oracle.hpp"
#include "support.hpp"

using namespace mlnet;
namespace fs = std::filesystem;

namespace {

constexpr double kContractionTol = 1e-9;
constexpr double kContractionSeconds = 5.0;
constexpr double kSpectralLambdaTol = 1e-8;
constexpr double kSpectralCosineTol = 1e-8;
constexpr double kSpectralSeconds = 10.0;
constexpr double kBlockLambdaTol = 1e-10;
constexpr double kBlockSliceTol = 1e-10;
constexpr double kBlockLaplacianTol = 1e-8;
constexpr double kKatzSolveTol = 1e-9;
constexpr double kKatzBoundary = 1e-12;
constexpr double kPairCStar = 2.0;
constexpr double kPairTol = 1e-5;
constexpr double kSurchargeLambdaTol = 1e-8;
constexpr double kSurchargeSeconds = 30.0;
constexpr double kConservationTol = 1e-9;
constexpr double kDiffusionOracleTol = 1e-6;
constexpr double kLoadingsTol = 1e-10;
constexpr double kReconstructionTol = 1e-9;
constexpr double kRegressionTol = 1e-9;
constexpr double kPathTol = 1e-12;
constexpr double kPipelineSeconds = 60.0;
constexpr double kScaleLambdaTol = 1e-9;
constexpr double kOrderingTieTol = 1e-9;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string failure;
  std::string summary;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      failure = what;
    }
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

MultilayerNetwork mono(const Eigen::MatrixXd& w) {
  return assemble_multilayer(NodeRegistry(testing::bank_ids(static_cast<std::size_t>(w.rows()))),
                             {testing::layer_from_dense(w, 0)}, MultiplexCoupling{});
}

MultilayerNetwork twin(const Eigen::MatrixXd& w, double omega) {
  return assemble_multilayer(NodeRegistry(testing::bank_ids(static_cast<std::size_t>(w.rows()))),
                             {testing::layer_from_dense(w, 0), testing::layer_from_dense(w, 1)},
                             MultiplexCoupling{omega});
}

// Random matrix plus a directed Hamiltonian cycle, hence irreducible.
Eigen::MatrixXd strongly_connected(std::mt19937_64& rng, std::size_t n, double density,
                                   bool diagonal = false) {
  Eigen::MatrixXd w = testing::random_weights(rng, n, density, diagonal);
  if (n > 1) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, (i + 1) % w.rows()) += 0.5;
  }
  return w;
}

// Laplacian of (W + W^T) / 2 with the diagonal ignored.
Eigen::MatrixXd sym_laplacian(const Eigen::MatrixXd& w) {
  Eigen::MatrixXd s = 0.5 * (w + w.transpose());
  s.diagonal().setZero();
  Eigen::MatrixXd l = -s;
  l.diagonal() = s.rowwise().sum();
  return l;
}

Eigen::VectorXd symmetric_spectrum(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
}

// Pairs strictly ordered in `a` (beyond a relative tie tolerance) keep their
// order in `b`; near-ties may resolve either way.
bool same_ordering(const std::vector<double>& a, const std::vector<double>& b) {
  auto sign = [](double x, double y) {
    const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
    if (std::abs(x - y) <= kOrderingTieTol * scale) return 0;
    return x > y ? 1 : -1;
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const int sa = sign(a[i], a[j]);
      const int sb = sign(b[i], b[j]);
      if (sa != 0 && sb != 0 && sa != sb) return false;
      if (sa != 0 && sb == 0) return false;
    }
  }
  return true;
}

// ----------------------------------------------------------------------------

Outcome contraction_consistency() {
  Outcome out;
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  const auto start = Clock::now();
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rep % 6);
    const std::size_t l = 1 + static_cast<std::size_t>((rep / 6) % 4);
    const auto net = testing::random_network(rng, n, l, 0.5, rep % 2 == 1, 0.4);
    // Raw iteration over the stored layer entries and coupling list.
    double raw = 0.0;
    for (std::size_t k = 0; k < l; ++k) {
      const Eigen::MatrixXd d = net.layer(k).weights.to_dense();
      for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j) raw += d(i, j);
    }
    for (const auto& e : net.interlayer()) raw += e.weight;
    const double projected = project_monoplex(net).weights.total();
    const double aggregate = layer_aggregate(net).q.sum();
    const double supra = supra_flatten(net).matrix.total();
    for (double v : {projected, aggregate, supra}) worst = std::max(worst, testing::rel_diff(v, raw));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  out.require(worst <= kContractionTol, "relative disagreement " + sci(worst));
  out.require(secs < kContractionSeconds, "took " + sci(secs) + " s");
  out.summary = "200 networks, max rel diff " + sci(worst) + ", " + sci(secs) + " s";
  return out;
}

Outcome spectral_oracle() {
  Outcome out;
  std::mt19937_64 rng(1002);
  double worst_lambda = 0.0, worst_cos = 0.0;
  int supra_cases = 0;
  EigenOptions opt;
  opt.tol = 1e-12;
  opt.max_iter = 200000;
  const auto start = Clock::now();
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::MatrixXd w;
    if (rep % 2 == 0) {
      w = strongly_connected(rng, 2 + static_cast<std::size_t>(rep % 11), 0.4, rep % 4 == 0);
    } else {
      const std::size_t n = 2 + static_cast<std::size_t>(rep % 3);
      const std::size_t l = 1 + static_cast<std::size_t>((rep / 2) % 3);
      auto net = testing::random_network(rng, n, l, 0.5, rep % 4 == 1, 0.6);
      w = supra_flatten(net).matrix.to_dense();
      // Keep the Perron root simple so the eigenvector is unique.
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, (i + 1) % w.rows()) += 0.3;
      ++supra_cases;
    }
    const auto oracle = testing::dense_perron(w);
    const auto a = CsrMatrix::from_dense(w);
    const auto p = dominant_eigenpair(a, opt);
    const double dl = std::abs(p.lambda - oracle.lambda);
    const double dr = std::abs(spectral_radius(a, opt) - oracle.lambda);
    const double dc = testing::cosine_distance(testing::to_eigen(p.vector), oracle.vector);
    worst_lambda = std::max({worst_lambda, dl, dr});
    worst_cos = std::max(worst_cos, dc);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  out.require(worst_lambda <= kSpectralLambdaTol, "|dlambda| " + sci(worst_lambda));
  out.require(worst_cos <= kSpectralCosineTol, "cosine distance " + sci(worst_cos));
  out.require(secs < kSpectralSeconds, "took " + sci(secs) + " s");
  out.summary = "100 matrices (" + std::to_string(supra_cases) + " supra), max |dlambda| " +
                sci(worst_lambda) + ", max cosine distance " + sci(worst_cos);
  return out;
}

Outcome block_identities() {
  Outcome out;
  std::mt19937_64 rng(1003);
  double worst_lambda = 0.0, worst_slice = 0.0, worst_spec = 0.0, worst_l2 = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 6);
    const Eigen::MatrixXd w = strongly_connected(rng, n, 0.4);
    const auto single = eigencentrality(mono(w), Scope::projected(), Orientation::Out);
    const auto both = eigencentrality(twin(w, 0.0), Scope::multilayer(), Orientation::Out);
    worst_lambda = std::max(worst_lambda, testing::rel_diff(std::stod(both.metadata.at("lambda_1")),
                                                            std::stod(single.metadata.at("lambda_1"))));
    out.require(both.layer_scores.has_value(), "no layer scores");
    if (both.layer_scores) {
      const Eigen::VectorXd v = testing::to_eigen(single.scores);
      for (Eigen::Index k = 0; k < 2; ++k) {
        worst_slice = std::max(worst_slice, testing::cosine_distance(both.layer_scores->col(k), v));
      }
    }

    const Eigen::MatrixXd mu_lap = sym_laplacian(w);
    const Eigen::VectorXd mu = symmetric_spectrum(mu_lap);
    for (double dx : {0.05, 0.3, 1.0, 4.0}) {
      const auto lap = supra_laplacian(twin(w, 1.0), dx);
      const Eigen::VectorXd got = symmetric_spectrum(lap.matrix.to_dense());
      std::vector<double> expected(mu.data(), mu.data() + mu.size());
      for (Eigen::Index i = 0; i < mu.size(); ++i) expected.push_back(mu(i) + 2.0 * dx);
      std::sort(expected.begin(), expected.end());
      for (std::size_t i = 0; i < expected.size(); ++i) {
        worst_spec = std::max(worst_spec, std::abs(got(static_cast<Eigen::Index>(i)) - expected[i]));
      }
      const auto conn = algebraic_connectivity(lap);
      worst_l2 = std::max(worst_l2, std::abs(conn.lambda2 - std::min(mu(1), 2.0 * dx)));
    }
  }
  out.require(worst_lambda <= kBlockLambdaTol, "supra vs monolayer lambda " + sci(worst_lambda));
  out.require(worst_slice <= kBlockSliceTol, "layer slice cosine distance " + sci(worst_slice));
  out.require(worst_spec <= kBlockLaplacianTol, "laplacian eigenvalue error " + sci(worst_spec));
  out.require(worst_l2 <= kBlockLaplacianTol, "lambda2 error " + sci(worst_l2));
  out.summary = "20 twins, lambda " + sci(worst_lambda) + ", slices " + sci(worst_slice) +
                ", spectrum " + sci(worst_spec) + ", lambda2 " + sci(worst_l2);
  return out;
}

Outcome katz_correctness() {
  Outcome out;
  std::mt19937_64 rng(1004);
  double worst = 0.0;
  int grid_points = 0;
  // Products a * lambda_1 straddling the divergence boundary. Points closer than
  // 5e-13 to it are left out: rounding in a * lambda_1 alone reaches that far.
  const double grid[] = {0.1, 0.5, 0.9, 0.999, 1.0 - 1e-6, 1.0 - 1e-9, 1.0 - 1e-11,
                         1.0 - 1.5e-12, 1.0 - 0.5e-12, 1.0 - 1e-13, 1.0, 1.0 + 1e-12, 1.0 + 1e-6,
                         1.5, 3.0};
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 9);
    const Eigen::MatrixXd w = strongly_connected(rng, n, 0.4, rep % 3 == 0);
    const auto a = CsrMatrix::from_dense(w);
    const double lambda = testing::dense_perron(w).lambda;
    const auto id = Eigen::MatrixXd::Identity(w.rows(), w.cols());
    for (double frac : {0.05, 0.3, 0.6, 0.9}) {
      const double att = frac / lambda;
      const Eigen::VectorXd oracle =
          (id - att * w).partialPivLu().solve(Eigen::VectorXd::Ones(w.rows()));
      const auto v = katz_scores(a, att, 1e-14);
      worst = std::max(worst, (testing::to_eigen(v) - oracle).cwiseAbs().maxCoeff());
    }
    for (double prod : grid) {
      const double att = prod / lambda;
      const bool should_raise = att * lambda >= 1.0 - kKatzBoundary;
      bool raised = false;
      try {
        (void)katz_scores(a, att);
      } catch (const Error& e) {
        raised = e.code() == ErrorCode::DivergentAttenuation;
      }
      ++grid_points;
      out.require(raised == should_raise,
                  "a*lambda = 1 - " + sci(1.0 - att * lambda) + (raised ? " raised" : " did not raise"));
    }
  }
  out.require(worst <= kKatzSolveTol, "l_inf vs dense solve " + sci(worst));
  out.summary = "120 solves, max l_inf " + sci(worst) + "; " + std::to_string(grid_points) +
                " boundary grid points classified";
  return out;
}

Outcome surcharge_calibration() {
  Outcome out;
  const auto start = Clock::now();
  // (a) symmetric pair: lambda(c) = e / (c0 + c / 2) = 1 at c = 2.
  const auto pair = mono((Eigen::MatrixXd(2, 2) << 0, 2, 2, 0).finished());
  const std::vector<double> c0{1.0, 1.0};
  const auto rep = calibrate_surcharge(pair, c0);
  out.require(std::abs(rep.c_star - kPairCStar) <= kPairTol, "pair c_star " + std::to_string(rep.c_star));
  for (double s : rep.surcharges) out.require(std::abs(s - 1.0) <= kPairTol, "pair surcharge " + std::to_string(s));

  // (b) generated bundles.
  int calibrated = 0;
  double worst_excess = -1.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GenSpec spec;
    if (seed % 2 == 0) {
      spec.model = CorePeriphery{4, 0.8, 0.3, 0.1};
    } else {
      spec.model = ErdosRenyi{0.35};
    }
    spec.n = 10 + seed % 11;
    spec.l = 1 + seed % 3;
    spec.seed = seed;
    const auto bundle = generate_network(spec);
    const auto caps = bundle.require_capitals();
    const double lambda0 = stability_index(bundle.network, caps);
    if (!(lambda0 > 0.0)) continue;
    SurchargeConfig cfg;
    cfg.threshold = lambda0 * (0.3 + 0.01 * static_cast<double>(seed % 50));
    const auto r = calibrate_surcharge(bundle.network, caps, cfg);
    ++calibrated;
    const double after = stability_index(bundle.network, apply_surcharge(caps, r.surcharges));
    worst_excess = std::max(worst_excess, after - cfg.threshold);
    out.require(after <= cfg.threshold + kSurchargeLambdaTol, "seed " + std::to_string(seed) + " lambda after " + sci(after));
    std::vector<double> below(caps.begin(), caps.end());
    const double c_lo = r.c_star * (1.0 - cfg.tol_c);
    for (std::size_t i = 0; i < below.size(); ++i) below[i] += c_lo * r.weights[i];
    out.require(stability_index(bundle.network, below) > cfg.threshold,
                "seed " + std::to_string(seed) + " is not tight at c_star");
  }
  out.require(calibrated == 50, "only " + std::to_string(calibrated) + " bundles calibrated");

  // (c) disjoint blocks: the targeting vector never reaches the weaker block.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 1) = w(1, 0) = 5.0;
  w(2, 3) = w(3, 2) = 3.0;
  bool unstabilizable = false;
  try {
    (void)calibrate_surcharge(mono(w), std::vector<double>(4, 1.0));
  } catch (const Error& e) {
    unstabilizable = e.code() == ErrorCode::Unstabilizable;
  }
  out.require(unstabilizable, "disjoint blocks did not raise unstabilizable");

  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  out.require(secs < kSurchargeSeconds, "took " + sci(secs) + " s");
  out.summary = "pair c_star " + std::to_string(rep.c_star) + ", " + std::to_string(calibrated) +
                " bundles, max lambda excess " + sci(worst_excess) + ", " + sci(secs) + " s";
  return out;
}

Outcome diffusion() {
  Outcome out;
  std::mt19937_64 rng(1006);
  double worst_mass = 0.0, worst_oracle = 0.0;
  int monotone_failures = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 5);
    const std::size_t l = 1 + static_cast<std::size_t>(rep % 3);
    if (n * l > 12) continue;
    const auto net = testing::random_network(rng, n, l, 0.5, rep % 2 == 1, 1.0);
    const double dx = 0.2 + 0.3 * static_cast<double>(rep % 4);
    const auto lap = supra_laplacian(net, dx);
    const Eigen::MatrixXd d = lap.matrix.to_dense();
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::vector<double> x0(lap.dim());
    for (auto& v : x0) v = u(rng);
    const double mass = std::accumulate(x0.begin(), x0.end(), 0.0);
    const double maxd = lap.max_diagonal();
    const double dt = maxd > 0.0 ? 0.02 / maxd : 0.02;
    const auto tr = diffuse(lap, x0, 2.0, dt, 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
    const Eigen::VectorXd x0v = testing::to_eigen(x0);
    for (std::size_t s = 0; s < tr.states.size(); ++s) {
      const auto& x = tr.states[s];
      worst_mass = std::max(worst_mass, std::abs(std::accumulate(x.begin(), x.end(), 0.0) - mass) / mass);
      const Eigen::VectorXd decay = (-es.eigenvalues().array() * tr.times[s]).exp();
      const Eigen::VectorXd oracle =
          es.eigenvectors() * decay.asDiagonal() * es.eigenvectors().transpose() * x0v;
      worst_oracle = std::max(worst_oracle, (testing::to_eigen(x) - oracle).cwiseAbs().maxCoeff());
    }
    double prev = -1.0;
    for (int k = 0; k < 10; ++k) {
      const double l2 = algebraic_connectivity(supra_laplacian(net, 0.25 * k)).lambda2;
      if (l2 < prev - 1e-12 * std::max(1.0, prev)) ++monotone_failures;
      prev = l2;
    }
  }
  out.require(worst_mass <= kConservationTol, "mass drift " + sci(worst_mass));
  out.require(worst_oracle <= kDiffusionOracleTol, "spectral oracle error " + sci(worst_oracle));
  out.require(monotone_failures == 0, std::to_string(monotone_failures) + " lambda2 decreases");
  out.summary = "mass drift " + sci(worst_mass) + ", oracle error " + sci(worst_oracle) +
                ", lambda2 monotone over 10-point grid";
  return out;
}

FactorPanel panel_of(const Eigen::MatrixXd& values) {
  FactorPanel p;
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    p.periods.push_back("2011-" + std::string(t < 9 ? "0" : "") + std::to_string(t + 1) + "-28");
  }
  for (Eigen::Index f = 0; f < values.cols(); ++f) p.factor_names.push_back("F" + std::to_string(f));
  p.values = values;
  return p;
}

Outcome pca_regression() {
  Outcome out;
  std::mt19937_64 rng(1007);
  std::normal_distribution<double> z(0.0, 1.0);
  double worst_orth = 0.0, worst_recon = 0.0, worst_reg = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index t = 12, f = 2 + rep % 4;
    Eigen::MatrixXd v(t, f);
    for (Eigen::Index i = 0; i < t; ++i)
      for (Eigen::Index j = 0; j < f; ++j) v(i, j) = z(rng) + (j > 0 ? 0.5 * v(i, j - 1) : 0.0);
    const auto full = pca(panel_of(v), 1.0);
    const Eigen::MatrixXd& l = full.loadings;
    worst_orth = std::max(worst_orth, (l.transpose() * l - Eigen::MatrixXd::Identity(l.cols(), l.cols()))
                                          .cwiseAbs().maxCoeff());
    worst_recon = std::max(worst_recon, (full.scores * l.transpose() - full.standardized).cwiseAbs().maxCoeff());

    const auto part = pca(panel_of(v), 0.8);
    std::vector<double> y(static_cast<std::size_t>(t));
    for (auto& x : y) x = 50.0 + 10.0 * z(rng);
    const auto reg = regress_layer_on_components(y, part, "UNSECURED_LENDING");
    // Normal equations (X^T X) b = X^T y with an intercept column.
    Eigen::MatrixXd x(t, part.scores.cols() + 1);
    x.col(0).setOnes();
    x.rightCols(part.scores.cols()) = part.scores;
    const Eigen::VectorXd b = (x.transpose() * x).ldlt().solve(x.transpose() * testing::to_eigen(y));
    worst_reg = std::max(worst_reg, std::abs(reg.intercept - b(0)));
    for (std::size_t j = 0; j < reg.coefficients.size(); ++j) {
      worst_reg = std::max(worst_reg, std::abs(reg.coefficients[j] - b(static_cast<Eigen::Index>(j) + 1)));
    }
  }
  // Rank one: the second factor is an affine copy of the first.
  const auto rank1 = pca(panel_of((Eigen::MatrixXd(5, 2) << 1, 3, 2, 5, 4, 9, 7, 15, 11, 23).finished()));
  out.require(rank1.components() == 1, "rank-1 fixture kept " + std::to_string(rank1.components()));
  out.require(std::abs(rank1.explained_ratio(0) - 1.0) <= kLoadingsTol, "rank-1 ratio " + sci(rank1.explained_ratio(0)));
  out.require(worst_orth <= kLoadingsTol, "loadings orthonormality " + sci(worst_orth));
  out.require(worst_recon <= kReconstructionTol, "reconstruction " + sci(worst_recon));
  out.require(worst_reg <= kRegressionTol, "regression vs normal equations " + sci(worst_reg));
  out.summary = "orthonormality " + sci(worst_orth) + ", reconstruction " + sci(worst_recon) +
                ", regression " + sci(worst_reg) + ", rank-1 m=" + std::to_string(rank1.components());
  return out;
}

Outcome path_centrality_oracle() {
  Outcome out;
  std::mt19937_64 rng(1008);
  std::uniform_int_distribution<int> dyadic(0, 2);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 6);
    Eigen::MatrixXd w = testing::random_weights(rng, n, 0.2 + 0.1 * (rep % 5));
    if (rep % 2 == 0) {
      // Dyadic weights give exact path lengths and genuine ties.
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
          if (w(i, j) > 0) w(i, j) = static_cast<double>(1 << dyadic(rng));
    }
    const auto oracle = testing::enumerate_paths(w);
    const auto a = CsrMatrix::from_dense(w);
    const auto b = betweenness_scores(a);
    const auto c = closeness_scores(a);
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max({worst, testing::rel_diff(b[i], oracle.betweenness[i]) * (oracle.betweenness[i] != 0 || b[i] != 0),
                        testing::rel_diff(c[i], oracle.closeness[i]) * (oracle.closeness[i] != 0 || c[i] != 0)});
    }
  }
  out.require(worst <= kPathTol, "relative disagreement " + sci(worst));
  out.summary = "100 digraphs up to N=7, max rel diff " + sci(worst);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism_and_pipeline() {
  Outcome out;
  for (std::uint64_t seed : {3u, 17u, 255u}) {
    GenSpec spec;
    spec.n = 15;
    spec.l = 4;
    spec.omega = 0.25;
    spec.seed = seed;
    const auto text = export_network(generate_network(spec), ExportFormat::Json);
    out.require(export_network(import_json(text), ExportFormat::Json) == text,
                "json round trip differs for seed " + std::to_string(seed));
    out.require(export_network(generate_network(spec), ExportFormat::Json) == text,
                "generation is not deterministic for seed " + std::to_string(seed));
  }

  const fs::path dir = fs::temp_directory_path() / ("mlnet_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto at = [&](const std::string& name) { return (dir / name).string(); };
  auto run = [&](std::vector<std::string> args) {
    std::ostringstream o, e;
    const int code = run_cli(args, o, e);
    out.require(code == 0, args[0] + " exited " + std::to_string(code) + ": " + e.str());
    return code;
  };
  const auto start = Clock::now();
  const std::string periods[] = {"2013-03-31", "2013-06-30", "2013-09-30"};
  for (int k = 0; k < 3; ++k) {
    const std::string tag = std::to_string(k);
    run({"generate", "--n", "50", "--l", "10", "--p", "0.245", "--omega", "0.001", "--seed",
         std::to_string(11 + k), "--period", periods[k], "--out", at("g" + tag + ".json"),
         "--exposures-out", at("e" + tag + ".csv"), "--capitals-out", at("c" + tag + ".csv")});
  }
  run({"build", "--exposures", at("e0.csv"), "--capitals", at("c0.csv"), "--omega", "0.001",
       "--sign-policy", "pass-through", "--out", at("b.json")});
  std::size_t edges = 0;
  if (out.ok) {
    const auto b = nlohmann::json::parse(slurp(at("b.json")));
    for (const auto& layer : b["intra"]) edges += layer.size();
  }
  run({"centrality", "--network", at("b.json"), "--measure", "eigencentrality", "--scope", "multilayer",
       "--out", at("cent.json")});
  run({"surcharge", "--network", at("b.json"), "--threshold", "1e9", "--out", at("probe.json")});
  double threshold = 0.0;
  if (out.ok) {
    threshold = 0.5 * nlohmann::json::parse(slurp(at("probe.json")))["lambda_before"].get<double>();
  }
  run({"surcharge", "--network", at("b.json"), "--threshold", std::to_string(threshold), "--out",
       at("s.json")});
  run({"diffusion", "--network", at("b.json"), "--dx", "0.5", "--t-end", "1.0", "--out", at("d.csv"),
       "--report", at("d.json")});
  run({"timescale", "--networks", at("g0.json"), at("g1.json"), at("g2.json"), "--measure", "pagerank",
       "--windows", "1,2", "--k", "5", "--out", at("ts.json")});
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  fs::remove_all(dir);
  out.require(edges >= 5000 && edges <= 7000, "pipeline network has " + std::to_string(edges) + " edges");
  out.require(secs < kPipelineSeconds, "pipeline took " + sci(secs) + " s");
  out.summary = "round trips byte-identical; pipeline on N=50, L=10, " + std::to_string(edges) +
                " edges in " + sci(secs) + " s";
  return out;
}

Outcome scale_invariance() {
  Outcome out;
  std::mt19937_64 rng(1010);
  double worst = 0.0;
  int comparisons = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 4 + static_cast<std::size_t>(rep % 5);
    const std::size_t l = 1 + static_cast<std::size_t>(rep % 3);
    const auto net = testing::random_network(rng, n, l, 0.5, rep % 4 == 3, 0.3);
    for (double s : {0.5, 10.0}) {
      const auto scaled = scale_network(net, s);
      for (const auto& scope : {Scope::projected(), Scope::multilayer(), Scope::of_layer(0)}) {
        const double l0 = spectral_radius(scope_matrix(net, scope));
        if (l0 > 0.0) {
          worst = std::max(worst, testing::rel_diff(spectral_radius(scope_matrix(scaled, scope)), s * l0));
        }
        for (auto m : {Measure::Degree, Measure::Strength, Measure::Eigencentrality, Measure::Katz,
                       Measure::PageRank, Measure::Betweenness, Measure::Closeness}) {
          if (m == Measure::Eigencentrality && l0 == 0.0) continue;
          MeasureSpec spec;
          spec.measure = m;
          spec.scope = scope;
          MeasureSpec sspec = spec;
          if (m == Measure::Katz) {
            // Same a * lambda_1 on both sides.
            spec.katz_attenuation = l0 > 0.0 ? 0.5 / l0 : 0.1;
            sspec.katz_attenuation = spec.katz_attenuation / s;
          }
          const auto a = compute_measure(net, spec).scores;
          const auto b = compute_measure(scaled, sspec).scores;
          ++comparisons;
          out.require(same_ordering(a, b), std::string(measure_name(m)) + " ordering changed at s=" + sci(s));
        }
      }
    }
  }
  out.require(worst <= kScaleLambdaTol, "lambda_1 scaling error " + sci(worst));
  out.summary = "20 instances, " + std::to_string(comparisons) + " orderings compared, lambda_1 rel err " + sci(worst);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"contraction consistency", contraction_consistency},
      {"spectral oracle", spectral_oracle},
      {"block-structure identities", block_identities},
      {"katz correctness", katz_correctness},
      {"surcharge calibration", surcharge_calibration},
      {"diffusion", diffusion},
      {"pca and regression", pca_regression},
      {"path centrality", path_centrality_oracle},
      {"determinism and pipeline", determinism_and_pipeline},
      {"scale invariance", scale_invariance},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.failure = std::string("exception: ") + e.what();
    }
    if (!o.ok) ++failed;
    std::printf("%s %2d %s: %s\n", o.ok ? "PASS" : "FAIL", index, c.name,
                o.ok ? o.summary.c_str() : o.failure.c_str());
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}

#include "mlnet/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlnet/centrality.hpp"
#include "mlnet/dynamics.hpp"
#include "mlnet/error.hpp"
#include "mlnet/factors.hpp"
#include "mlnet/ingest.hpp"
#include "mlnet/report.hpp"
#include "mlnet/surcharge.hpp"
#include "mlnet/testbed.hpp"

namespace mlnet {

namespace {

using json = nlohmann::json;

struct Inputs {
  std::map<std::string, std::string> digests;

  std::string read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    digests[path] = sha256_hex(text);
    return text;
  }
};

void write_output(const std::string& path, const std::string& content, bool force) {
  if (path.empty()) return;
  if (!force && std::filesystem::exists(path)) {
    throw Error(ErrorCode::OutputExists, path + " exists (use --force to overwrite)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write to " + path + " failed");
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json report_meta(const std::string& command, const json& config, const Inputs& inputs) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", command},
          {"config", config},
          {"inputs", inputs.digests}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

LayerRegistry registry_with(const std::vector<std::string>& extra) {
  auto r = LayerRegistry::canonical();
  for (const auto& e : extra) r.add(e);
  return r;
}

NetworkBundle load_network(Inputs& inputs, const std::string& path) {
  return import_json(inputs.read(path));
}

// Replaces the bundle's capitals with the rows of a capitals CSV for its period.
void override_capitals(NetworkBundle& b, Inputs& inputs, const std::string& path) {
  std::istringstream in(inputs.read(path));
  const auto rows = parse_capitals(in);
  b.capitals.assign(b.network.node_count(), std::nullopt);
  for (const auto& r : rows) {
    if (r.period != b.period) continue;
    if (auto i = b.network.nodes().find(r.bank)) b.capitals[*i] = r.total_capital;
  }
}

// --------------------------------------------------------------------------
// Subcommand option blocks

struct Common {
  bool force = false;
};

struct GenerateOpts {
  std::string model = "er";
  std::size_t n = 10, l = 1, core_size = 5;
  double p = 0.1, p_core = 0.8, p_cross = 0.2, p_periph = 0.02;
  double mu = 0.0, sigma = 1.0, omega = 0.0;
  std::uint64_t seed = 1;
  std::string period = "2013-06-30";
  std::string out, exposures_out, capitals_out;
};

struct BuildOpts {
  std::string exposures, capitals, period, out;
  std::string sign_policy = "canonical";
  double omega = 0.0;
  std::vector<std::string> extra_layers;
};

struct ExportOpts {
  std::string network, format = "json", out;
};

struct MeasureOpts {
  std::string measure = "eigencentrality";
  std::string scope = "projected";
  std::string orientation = "out";
  double a = 0.1, damping = 0.85, teleport = 0.0, tol = 1e-10;
  std::size_t max_iter = 10000;
};

struct CentralityOpts {
  std::string network, out, layer_scores_out, capitals;
  std::string measures = "strength,eigencentrality,pagerank,betweenness,closeness";
  bool capital_relative = false;
  MeasureOpts m;
};

struct SurchargeOpts {
  std::string network, capitals, out, csv_out;
  double threshold = 1.0, a = 0.1, tol_lambda = 1e-8, tol_c = 1e-6, c_max_initial = 0.0;
  double teleport = 0.0;
  std::string vector = "eigencentrality", scope = "projected";
  bool recompute = false;
};

struct DiffusionOpts {
  std::string network, out, report, init = "strength";
  double dx = 1.0, t_end = 1.0, dt = 0.0;
  std::size_t sample_every = 1;
};

struct TimescaleOpts {
  std::vector<std::string> networks;
  std::string exposures, out, windows = "1";
  std::vector<std::string> extra_layers;
  double omega = 0.0;
  std::size_t k = 5;
  MeasureOpts m;
};

struct FactorsOpts {
  std::string factors, exposures, out, loadings_out;
  double threshold = 0.9;
  std::vector<std::string> extra_layers;
};

void add_measure_options(CLI::App* sc, MeasureOpts& m) {
  sc->add_option("--measure", m.measure,
                 "degree|strength|eigencentrality|katz|pagerank|betweenness|closeness");
  sc->add_option("--scope", m.scope, "projected|multilayer|layer:<NAME>");
  sc->add_option("--orientation", m.orientation, "out|in|total");
  sc->add_option("--a", m.a, "Katz attenuation");
  sc->add_option("--damping", m.damping, "PageRank damping");
  sc->add_option("--teleport", m.teleport, "uniform teleport for eigencentrality");
  sc->add_option("--tol", m.tol, "iteration tolerance");
  sc->add_option("--max-iter", m.max_iter, "iteration cap");
}

MeasureSpec resolve_measure(const MeasureOpts& m, const MultilayerNetwork& net) {
  MeasureSpec spec;
  spec.measure = parse_measure(m.measure);
  spec.scope = parse_scope(m.scope, net);
  spec.orientation = parse_orientation(m.orientation);
  spec.katz_attenuation = m.a;
  spec.damping = m.damping;
  spec.eigen.teleport = m.teleport;
  spec.eigen.tol = m.tol;
  spec.eigen.max_iter = m.max_iter;
  return spec;
}

json measure_config(const MeasureOpts& m) {
  return {{"measure", m.measure}, {"scope", m.scope},       {"orientation", m.orientation},
          {"a", m.a},             {"damping", m.damping},   {"teleport", m.teleport},
          {"tol", m.tol},         {"max_iter", m.max_iter}};
}

std::vector<std::size_t> parse_windows(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(item, &pos);
      if (pos != item.size() || v <= 0) throw std::invalid_argument("window");
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad window size '" + item + "'");
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Subcommand bodies

void do_generate(const GenerateOpts& o, const Common& c, std::ostream& out) {
  GenSpec spec;
  if (o.model == "er") {
    spec.model = ErdosRenyi{o.p};
  } else if (o.model == "cp") {
    spec.model = CorePeriphery{o.core_size, o.p_core, o.p_cross, o.p_periph};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + o.model + "'");
  }
  spec.n = o.n;
  spec.l = o.l;
  spec.mu = o.mu;
  spec.sigma = o.sigma;
  spec.omega = o.omega;
  spec.seed = o.seed;
  spec.period = o.period;
  if (!is_iso_date(spec.period)) throw Error(ErrorCode::InvalidArgument, "bad period " + spec.period);
  auto bundle = generate_network(spec);
  std::ostringstream desc;
  desc << "generate:model=" << o.model << ";n=" << o.n << ";l=" << o.l << ";seed=" << o.seed
       << ";mu=" << format_double(o.mu) << ";sigma=" << format_double(o.sigma)
       << ";omega=" << format_double(o.omega);
  if (o.model == "er") {
    desc << ";p=" << format_double(o.p);
  } else {
    desc << ";core_size=" << o.core_size << ";p_core=" << format_double(o.p_core)
         << ";p_cross=" << format_double(o.p_cross) << ";p_periph=" << format_double(o.p_periph);
  }
  bundle.provenance.push_back(desc.str());
  write_output(o.out, export_network(bundle, ExportFormat::Json), c.force);
  if (!o.exposures_out.empty()) {
    write_output(o.exposures_out, export_network(bundle, ExportFormat::Csv), c.force);
  }
  if (!o.capitals_out.empty()) {
    std::ostringstream caps;
    caps << "period,bank,total_capital\n";
    for (std::size_t i = 0; i < bundle.network.node_count(); ++i) {
      caps << bundle.period << ',' << bundle.network.nodes().id(i) << ','
           << format_double(*bundle.capitals[i]) << '\n';
    }
    write_output(o.capitals_out, caps.str(), c.force);
  }
  out << "generated " << bundle.network.node_count() << " banks x "
      << bundle.network.layer_count() << " layers\n";
}

void do_build(const BuildOpts& o, const Common& c, std::ostream& out) {
  Inputs inputs;
  const auto layers = registry_with(o.extra_layers);
  std::istringstream ex(inputs.read(o.exposures));
  const auto records = parse_exposures(ex, layers);
  std::vector<CapitalRecord> capitals;
  if (!o.capitals.empty()) {
    std::istringstream cs(inputs.read(o.capitals));
    capitals = parse_capitals(cs);
  }
  std::string period = o.period;
  if (period.empty()) {
    const auto periods = periods_of(records);
    if (periods.size() != 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "exposures span " + std::to_string(periods.size()) +
                      " periods; choose one with --period");
    }
    period = periods.front();
  }
  SignPolicy policy;
  if (o.sign_policy == "canonical") {
    policy = SignPolicy::canonical();
  } else if (o.sign_policy != "pass-through") {
    throw Error(ErrorCode::InvalidArgument, "unknown sign policy '" + o.sign_policy + "'");
  }
  auto bundle = build_bundle(records, capitals, period, MultiplexCoupling{o.omega}, layers, policy);
  for (const auto& [path, digest] : inputs.digests) {
    bundle.provenance.push_back(std::filesystem::path(path).filename().string() +
                                ":sha256=" + digest);
  }
  write_output(o.out, export_network(bundle, ExportFormat::Json), c.force);
  out << "built " << bundle.period << ": " << bundle.network.node_count() << " banks"
      << (bundle.capitals_complete() ? "" : " (capitals incomplete)") << "\n";
}

void do_export(const ExportOpts& o, const Common& c, std::ostream&) {
  Inputs inputs;
  const auto bundle = load_network(inputs, o.network);
  write_output(o.out, export_network(bundle, parse_export_format(o.format)), c.force);
}

void do_centrality(const CentralityOpts& o, const Common& c, std::ostream&) {
  Inputs inputs;
  auto bundle = load_network(inputs, o.network);
  if (!o.capitals.empty()) override_capitals(bundle, inputs, o.capitals);
  MultilayerNetwork net = o.capital_relative
                              ? normalize_by_capital(bundle.network, bundle.require_capitals())
                              : bundle.network;
  CentralityResult result;
  if (o.m.measure == "composite") {
    std::vector<CentralityResult> parts;
    std::stringstream ss(o.measures);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto mo = o.m;
      mo.measure = item;
      parts.push_back(compute_measure(net, resolve_measure(mo, net)));
    }
    result = composite_centrality(parts);
  } else {
    result = compute_measure(net, resolve_measure(o.m, net));
  }
  if (ends_with(o.out, ".json")) {
    auto config = measure_config(o.m);
    config["capital_relative"] = o.capital_relative;
    if (o.m.measure == "composite") config["measures"] = o.measures;
    json j = centrality_json(result);
    j["meta"] = report_meta("centrality", config, inputs);
    write_output(o.out, dump(j), c.force);
  } else {
    write_output(o.out, centrality_csv(result), c.force);
  }
  if (!o.layer_scores_out.empty()) {
    if (!result.layer_scores) {
      throw Error(ErrorCode::InvalidArgument,
                  "layer scores exist only for multilayer eigencentrality");
    }
    write_output(o.layer_scores_out, layer_scores_csv(result), c.force);
  }
}

void do_surcharge(const SurchargeOpts& o, const Common& c, std::ostream& out) {
  Inputs inputs;
  auto bundle = load_network(inputs, o.network);
  if (!o.capitals.empty()) override_capitals(bundle, inputs, o.capitals);
  const auto capitals = bundle.require_capitals();
  SurchargeConfig cfg;
  cfg.threshold = o.threshold;
  if (o.vector == "eigencentrality") {
    cfg.vector_kind = TargetingKind::Eigencentrality;
  } else if (o.vector == "katz") {
    cfg.vector_kind = TargetingKind::Katz;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown targeting vector '" + o.vector + "'");
  }
  cfg.katz_attenuation = o.a;
  cfg.scope = parse_scope(o.scope, bundle.network);
  cfg.tol_lambda = o.tol_lambda;
  cfg.tol_c = o.tol_c;
  cfg.c_max_initial = o.c_max_initial;
  cfg.recompute_vector = o.recompute;
  cfg.eigen.teleport = o.teleport;
  const auto rep = calibrate_surcharge(bundle.network, capitals, cfg);
  json config = {{"threshold", o.threshold},     {"vector", o.vector},
                 {"a", o.a},                     {"scope", o.scope},
                 {"tol_lambda", o.tol_lambda},   {"tol_c", o.tol_c},
                 {"c_max_initial", o.c_max_initial}, {"recompute_vector", o.recompute},
                 {"teleport", o.teleport}};
  json j = surcharge_json(rep, bundle.network.nodes());
  j["meta"] = report_meta("surcharge", config, inputs);
  write_output(o.out, dump(j), c.force);
  write_output(o.csv_out, surcharge_csv(rep, bundle.network.nodes()), c.force);
  out << "c_star " << format_double(rep.c_star) << " lambda " << format_double(rep.lambda_before)
      << " -> " << format_double(rep.lambda_after) << "\n";
}

std::vector<double> initial_state(const std::string& init, const MultilayerNetwork& net,
                                  const SupraLaplacian& lap) {
  const std::size_t dim = lap.dim();
  if (init == "uniform") return std::vector<double>(dim, 1.0);
  if (init == "strength") {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = lap.matrix.at(i, i);
    return x;
  }
  if (init.starts_with("node:")) {
    const auto label = init.substr(5);
    const auto at = label.rfind('@');
    if (at == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "initial node must be bank@layer");
    }
    const std::size_t i = net.nodes().index(label.substr(0, at));
    const std::size_t k = net.layer_registry().at(label.substr(at + 1)).index;
    std::vector<double> x(dim, 0.0);
    x[k * net.node_count() + i] = 1.0;
    return x;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown initial state '" + init + "'");
}

void do_diffusion(const DiffusionOpts& o, const Common& c, std::ostream& out) {
  Inputs inputs;
  const auto bundle = load_network(inputs, o.network);
  const auto lap = supra_laplacian(bundle.network, o.dx);
  const double maxd = lap.max_diagonal();
  double dt = o.dt;
  if (dt <= 0.0) dt = maxd > 0.0 ? 0.5 / maxd : o.t_end / 100.0;
  const auto x0 = initial_state(o.init, bundle.network, lap);
  const auto traj = diffuse(lap, x0, o.t_end, dt, o.sample_every);
  write_output(o.out, trajectory_csv(traj, bundle.network), c.force);
  const auto conn = algebraic_connectivity(lap);
  const double mass0 = std::accumulate(x0.begin(), x0.end(), 0.0);
  double drift = 0.0;
  for (const auto& s : traj.states) {
    drift = std::max(drift, std::abs(std::accumulate(s.begin(), s.end(), 0.0) - mass0));
  }
  if (!o.report.empty()) {
    json config = {{"dx", o.dx},   {"t_end", o.t_end}, {"dt", dt},
                   {"sample_every", o.sample_every}, {"init", o.init}};
    json j = {{"lambda2", conn.lambda2},
              {"connected", conn.connected},
              {"samples", traj.times.size()},
              {"initial_mass", mass0},
              {"max_mass_drift", drift},
              {"meta", report_meta("diffusion", config, inputs)}};
    write_output(o.report, dump(j), c.force);
  }
  out << "lambda2 " << format_double(conn.lambda2) << (conn.connected ? "" : " (disconnected)")
      << "\n";
}

void do_timescale(const TimescaleOpts& o, const Common& c, std::ostream&) {
  Inputs inputs;
  std::vector<NetworkBundle> snapshots;
  if (!o.exposures.empty()) {
    const auto layers = registry_with(o.extra_layers);
    std::istringstream ex(inputs.read(o.exposures));
    const auto records = parse_exposures(ex, layers);
    // One registry across periods so every snapshot shares the bank set.
    std::vector<CapitalRecord> placeholders;
    std::set<std::string> banks;
    for (const auto& r : records) {
      banks.insert(r.from_bank);
      banks.insert(r.to_bank);
    }
    for (const auto& period : periods_of(records)) {
      std::vector<CapitalRecord> caps;
      for (const auto& b : banks) caps.push_back({period, b, 1.0});
      auto bundle = build_bundle(records, caps, period, MultiplexCoupling{o.omega}, layers);
      bundle.capitals.assign(bundle.network.node_count(), std::nullopt);
      snapshots.push_back(std::move(bundle));
    }
  } else {
    for (const auto& path : o.networks) snapshots.push_back(load_network(inputs, path));
    std::stable_sort(snapshots.begin(), snapshots.end(),
                     [](const auto& a, const auto& b) { return a.period < b.period; });
  }
  if (snapshots.empty()) throw Error(ErrorCode::InvalidArgument, "no snapshots given");
  const auto spec = resolve_measure(o.m, snapshots.front().network);
  const auto windows = parse_windows(o.windows);
  const auto rep = timescale_centrality_stability(snapshots, spec, windows, o.k);
  auto config = measure_config(o.m);
  config["windows"] = windows;
  config["k"] = o.k;
  config["omega"] = o.omega;
  json j = timescale_json(rep);
  j["meta"] = report_meta("timescale", config, inputs);
  write_output(o.out, dump(j), c.force);
}

void do_factors(const FactorsOpts& o, const Common& c, std::ostream& out) {
  Inputs inputs;
  std::istringstream fs(inputs.read(o.factors));
  const auto panel = panel_from_records(parse_factors(fs));
  const auto result = pca(panel, o.threshold);
  json j = pca_json(result);
  json regs = json::array();
  if (!o.exposures.empty()) {
    const auto layers = registry_with(o.extra_layers);
    std::istringstream ex(inputs.read(o.exposures));
    const auto records = parse_exposures(ex, layers);
    const auto totals = layer_totals_by_period(records, panel.periods, layers);
    std::set<std::string> present;
    for (const auto& r : records) present.insert(r.layer.name);
    for (std::size_t k = 0; k < layers.size(); ++k) {
      if (!present.count(layers.names()[k])) continue;
      const Eigen::VectorXd col = totals.col(static_cast<Eigen::Index>(k));
      const std::vector<double> series(col.data(), col.data() + col.size());
      regs.push_back(regression_json(regress_layer_on_components(series, result, layers.names()[k])));
    }
  }
  j["regressions"] = regs;
  j["meta"] = report_meta("factors", {{"threshold", o.threshold}}, inputs);
  write_output(o.out, dump(j), c.force);
  write_output(o.loadings_out, loadings_csv(result), c.force);
  out << "retained " << result.components() << " of " << panel.factor_names.size()
      << " components\n";
}

std::string single_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilayer interbank exposure network analytics", kToolName};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kToolVersion);

  Common common;
  GenerateOpts gen;
  BuildOpts build;
  ExportOpts exp;
  CentralityOpts cen;
  SurchargeOpts sur;
  DiffusionOpts dif;
  TimescaleOpts ts;
  FactorsOpts fac;
  std::function<void()> action;

  auto* g = app.add_subcommand("generate", "Generate a synthetic network bundle");
  g->add_option("--model", gen.model, "er|cp");
  g->add_option("--n", gen.n, "banks");
  g->add_option("--l", gen.l, "layers");
  g->add_option("--p", gen.p, "edge probability (er)");
  g->add_option("--core-size", gen.core_size);
  g->add_option("--p-core", gen.p_core);
  g->add_option("--p-cross", gen.p_cross);
  g->add_option("--p-periph", gen.p_periph);
  g->add_option("--mu", gen.mu, "log-normal location");
  g->add_option("--sigma", gen.sigma, "log-normal scale");
  g->add_option("--omega", gen.omega, "multiplex coupling");
  g->add_option("--seed", gen.seed);
  g->add_option("--period", gen.period);
  g->add_option("--out", gen.out, "bundle JSON")->required();
  g->add_option("--exposures-out", gen.exposures_out, "exposures CSV");
  g->add_option("--capitals-out", gen.capitals_out, "capitals CSV");
  g->add_flag("--force", common.force);
  g->callback([&] { action = [&] { do_generate(gen, common, out); }; });

  auto* b = app.add_subcommand("build", "Build a network bundle from CSV inputs");
  b->add_option("--exposures", build.exposures)->required();
  b->add_option("--capitals", build.capitals);
  b->add_option("--period", build.period);
  b->add_option("--omega", build.omega, "multiplex coupling");
  b->add_option("--extra-layer", build.extra_layers, "user-defined layer name");
  b->add_option("--sign-policy", build.sign_policy,
                "canonical, or pass-through for exported (already normalized) exposures");
  b->add_option("--out", build.out)->required();
  b->add_flag("--force", common.force);
  b->callback([&] { action = [&] { do_build(build, common, out); }; });

  auto* e = app.add_subcommand("export", "Export a bundle as json, graphml, dot or csv");
  e->add_option("--network", exp.network)->required();
  e->add_option("--format", exp.format, "json|graphml|dot|csv");
  e->add_option("--out", exp.out)->required();
  e->add_flag("--force", common.force);
  e->callback([&] { action = [&] { do_export(exp, common, out); }; });

  auto* ce = app.add_subcommand("centrality", "Compute a centrality measure");
  ce->add_option("--network", cen.network)->required();
  add_measure_options(ce, cen.m);
  ce->add_option("--measures", cen.measures, "inputs of --measure composite");
  ce->add_option("--capitals", cen.capitals, "capitals CSV overriding the bundle");
  ce->add_flag("--capital-relative", cen.capital_relative, "divide exposures by holder capital");
  ce->add_option("--out", cen.out, ".csv or .json")->required();
  ce->add_option("--layer-scores-out", cen.layer_scores_out);
  ce->add_flag("--force", common.force);
  ce->callback([&] { action = [&] { do_centrality(cen, common, out); }; });

  auto* s = app.add_subcommand("surcharge", "Calibrate the stabilizing capital surcharge");
  s->add_option("--network", sur.network)->required();
  s->add_option("--capitals", sur.capitals, "capitals CSV overriding the bundle");
  s->add_option("--threshold", sur.threshold);
  s->add_option("--vector", sur.vector, "eigencentrality|katz");
  s->add_option("--a", sur.a, "Katz attenuation");
  s->add_option("--scope", sur.scope);
  s->add_option("--tol-lambda", sur.tol_lambda);
  s->add_option("--tol-c", sur.tol_c);
  s->add_option("--c-max-initial", sur.c_max_initial);
  s->add_option("--teleport", sur.teleport);
  s->add_flag("--recompute-vector", sur.recompute);
  s->add_option("--out", sur.out, "report JSON")->required();
  s->add_option("--csv-out", sur.csv_out, "per-bank surcharges CSV");
  s->add_flag("--force", common.force);
  s->callback([&] { action = [&] { do_surcharge(sur, common, out); }; });

  auto* d = app.add_subcommand("diffusion", "Diffuse on the supra-Laplacian");
  d->add_option("--network", dif.network)->required();
  d->add_option("--dx", dif.dx, "interlayer coupling strength");
  d->add_option("--t-end", dif.t_end);
  d->add_option("--dt", dif.dt, "step (default 0.5 / max diagonal)");
  d->add_option("--sample-every", dif.sample_every);
  d->add_option("--init", dif.init, "strength|uniform|node:<bank>@<layer>");
  d->add_option("--out", dif.out, "trajectory CSV")->required();
  d->add_option("--report", dif.report, "summary JSON");
  d->add_flag("--force", common.force);
  d->callback([&] { action = [&] { do_diffusion(dif, common, out); }; });

  auto* t = app.add_subcommand("timescale", "Centrality stability across time scales");
  t->add_option("--networks", ts.networks, "bundle JSON snapshots");
  t->add_option("--exposures", ts.exposures, "multi-period exposures CSV");
  t->add_option("--omega", ts.omega);
  t->add_option("--extra-layer", ts.extra_layers);
  add_measure_options(t, ts.m);
  t->add_option("--windows", ts.windows, "comma-separated window sizes");
  t->add_option("--k", ts.k, "top-k size");
  t->add_option("--out", ts.out)->required();
  t->add_flag("--force", common.force);
  t->callback([&] { action = [&] { do_timescale(ts, common, out); }; });

  auto* f = app.add_subcommand("factors", "PCA of macro factors and per-layer regression");
  f->add_option("--factors", fac.factors)->required();
  f->add_option("--exposures", fac.exposures);
  f->add_option("--extra-layer", fac.extra_layers);
  f->add_option("--threshold", fac.threshold, "cumulative explained-variance threshold");
  f->add_option("--out", fac.out)->required();
  f->add_option("--loadings-out", fac.loadings_out);
  f->add_flag("--force", common.force);
  f->callback([&] { action = [&] { do_factors(fac, common, out); }; });

  std::vector<std::string> argv_store{kToolName};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << single_line(e.what()) << "\n";
    return 2;
  }

  try {
    action();
  } catch (const Error& e) {
    err << "ERROR " << code_name(e.code()) << ": " << single_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "ERROR internal: " << single_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mlnet

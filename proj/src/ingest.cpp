#include "mlnet/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "mlnet/error.hpp"

namespace mlnet {

namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV line. Double-quoted fields may contain commas; "" escapes a quote.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(trim(cur));
  return fields;
}

struct CsvTable {
  std::vector<std::size_t> columns;  // positions of the requested columns
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

CsvTable read_csv(std::istream& in, std::span<const std::string_view> required) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) continue;
    auto fields = split_csv(line, line_no);
    if (!have_header) {
      for (auto name : required) {
        auto it = std::find(fields.begin(), fields.end(), name);
        if (it == fields.end()) {
          throw Error(ErrorCode::ParseError, "missing column '" + std::string(name) + "'");
        }
        table.columns.push_back(static_cast<std::size_t>(it - fields.begin()));
      }
      width = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != width) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(width) + " fields, found " +
                                             std::to_string(fields.size()));
    }
    std::vector<std::string> picked;
    for (auto c : table.columns) picked.push_back(std::move(fields[c]));
    table.rows.emplace_back(line_no, std::move(picked));
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "missing header row");
  return table;
}

double parse_number(const std::string& text, std::size_t line_no, std::string_view what) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unparseable " +
                                           std::string(what) + " '" + text + "'");
  }
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFinite, "line " + std::to_string(line_no) + ": non-finite " +
                                          std::string(what));
  }
  return v;
}

void require_date(const std::string& text, std::size_t line_no) {
  if (!is_iso_date(text)) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no) + ": unparseable date '" + text + "'");
  }
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string replica_label(const MultilayerNetwork& net, std::size_t node, std::size_t layer) {
  return net.nodes().id(node) + "@" + net.layer(layer).layer.name;
}

std::string export_json(const NetworkBundle& b) {
  const auto& net = b.network;
  json j;
  j["period"] = b.period;
  j["nodes"] = net.nodes().ids();
  json layers = json::array();
  json intra = json::array();
  for (const auto& m : net.layers()) {
    layers.push_back(m.layer.name);
    json entries = json::array();
    m.weights.for_each([&](std::size_t r, std::size_t c, double w) {
      entries.push_back(json::array({r, c, w}));
    });
    intra.push_back(std::move(entries));
  }
  j["layers"] = std::move(layers);
  j["intra"] = std::move(intra);
  json inter = json::array();
  for (const auto& e : net.interlayer()) {
    inter.push_back(json::array({e.node_from, e.layer_from, e.node_to, e.layer_to, e.weight}));
  }
  j["interlayer"] = std::move(inter);
  json caps = json::array();
  for (const auto& c : b.capitals) {
    if (c) {
      caps.push_back(*c);
    } else {
      caps.push_back(nullptr);
    }
  }
  j["capitals"] = std::move(caps);
  j["multiplex_flag"] = net.multiplex();
  j["dimensionless"] = net.dimensionless();
  j["provenance"] = b.provenance;
  return j.dump(1) + "\n";
}

std::string export_graphml(const NetworkBundle& b) {
  const auto& net = b.network;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"bank\" for=\"node\" attr.name=\"bank\" attr.type=\"string\"/>\n"
      << "  <key id=\"layer\" for=\"node\" attr.name=\"layer\" attr.type=\"string\"/>\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <graph id=\"" << xml_escape(b.period) << "\" edgedefault=\"directed\">\n";
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    for (std::size_t i = 0; i < net.node_count(); ++i) {
      out << "    <node id=\"" << xml_escape(replica_label(net, i, k)) << "\">"
          << "<data key=\"bank\">" << xml_escape(net.nodes().id(i)) << "</data>"
          << "<data key=\"layer\">" << xml_escape(net.layer(k).layer.name) << "</data>"
          << "</node>\n";
    }
  }
  const auto supra = supra_flatten(net);
  supra.matrix.for_each([&](std::size_t r, std::size_t c, double w) {
    out << "    <edge source=\"" << xml_escape(replica_label(net, r % supra.nodes, r / supra.nodes))
        << "\" target=\"" << xml_escape(replica_label(net, c % supra.nodes, c / supra.nodes))
        << "\"><data key=\"weight\">" << format_double(w) << "</data></edge>\n";
  });
  out << "  </graph>\n</graphml>\n";
  return out.str();
}

std::string export_dot(const NetworkBundle& b) {
  const auto& net = b.network;
  std::ostringstream out;
  out << "digraph \"" << dot_escape(b.period) << "\" {\n";
  for (std::size_t k = 0; k < net.layer_count(); ++k) {
    for (std::size_t i = 0; i < net.node_count(); ++i) {
      out << "  \"" << dot_escape(replica_label(net, i, k)) << "\";\n";
    }
  }
  const auto supra = supra_flatten(net);
  supra.matrix.for_each([&](std::size_t r, std::size_t c, double w) {
    out << "  \"" << dot_escape(replica_label(net, r % supra.nodes, r / supra.nodes))
        << "\" -> \"" << dot_escape(replica_label(net, c % supra.nodes, c / supra.nodes))
        << "\" [weight=" << format_double(w) << "];\n";
  });
  out << "}\n";
  return out.str();
}

std::string export_csv(const NetworkBundle& b) {
  const auto& net = b.network;
  std::ostringstream out;
  out << "period,from_bank,to_bank,layer,amount\n";
  for (const auto& m : net.layers()) {
    m.weights.for_each([&](std::size_t i, std::size_t j, double w) {
      out << csv_field(b.period) << ',' << csv_field(net.nodes().id(i)) << ','
          << csv_field(net.nodes().id(j)) << ',' << m.layer.name << ',' << format_double(w)
          << '\n';
    });
  }
  return out.str();
}

}  // namespace

std::string_view sign_rule_name(SignRule rule) {
  switch (rule) {
    case SignRule::NonnegativeOnly: return "NONNEGATIVE_ONLY";
    case SignRule::LongOnly: return "LONG_ONLY";
    case SignRule::ShortOnly: return "SHORT_ONLY";
    case SignRule::Absolute: return "ABSOLUTE";
  }
  return "?";
}

SignPolicy SignPolicy::canonical() {
  SignPolicy p;
  p.set(canonical_layer_name(CanonicalLayer::CdsNetSold), SignRule::ShortOnly);
  p.set(canonical_layer_name(CanonicalLayer::MarketableSecurities), SignRule::LongOnly);
  return p;
}

SignPolicy SignPolicy::pass_through() { return SignPolicy{}; }

SignRule SignPolicy::rule_for(std::string_view layer_name) const {
  auto it = rules_.find(layer_name);
  return it == rules_.end() ? SignRule::NonnegativeOnly : it->second;
}

void SignPolicy::set(std::string_view layer_name, SignRule rule) {
  rules_[std::string(layer_name)] = rule;
}

bool NetworkBundle::capitals_complete() const {
  if (capitals.size() != network.node_count()) return false;
  return std::all_of(capitals.begin(), capitals.end(),
                     [](const auto& c) { return c.has_value() && *c > 0.0; });
}

std::vector<double> NetworkBundle::require_capitals() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < network.node_count(); ++i) {
    if (i >= capitals.size() || !capitals[i] || !(*capitals[i] > 0.0)) {
      throw Error(ErrorCode::CapitalsIncomplete,
                  "no positive capital for bank " + network.nodes().id(i));
    }
    out.push_back(*capitals[i]);
  }
  return out;
}

ExportFormat parse_export_format(std::string_view name) {
  if (name == "json") return ExportFormat::Json;
  if (name == "graphml") return ExportFormat::GraphMl;
  if (name == "dot") return ExportFormat::Dot;
  if (name == "csv") return ExportFormat::Csv;
  throw Error(ErrorCode::UnsupportedFormat, "unsupported format '" + std::string(name) + "'");
}

bool is_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc() && p == text.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return false;
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}}
      .ok();
}

std::vector<ExposureRecord> parse_exposures(std::istream& in, const LayerRegistry& layers) {
  static constexpr std::array<std::string_view, 5> kCols = {"period", "from_bank", "to_bank",
                                                            "layer", "amount"};
  auto table = read_csv(in, kCols);
  std::vector<ExposureRecord> out;
  out.reserve(table.rows.size());
  for (auto& [line_no, f] : table.rows) {
    require_date(f[0], line_no);
    if (f[1].empty() || f[2].empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty bank id");
    }
    auto layer = layers.find(f[3]);
    if (!layer) {
      throw Error(ErrorCode::UnknownLayer,
                  "line " + std::to_string(line_no) + ": unknown layer '" + f[3] + "'");
    }
    if (f[1] == f[2]) {
      throw Error(ErrorCode::SelfExposure,
                  "line " + std::to_string(line_no) + ": self-exposure of " + f[1]);
    }
    const double amount = parse_number(f[4], line_no, "amount");
    out.push_back({std::move(f[0]), std::move(f[1]), std::move(f[2]), *layer, amount});
  }
  return out;
}

std::vector<CapitalRecord> parse_capitals(std::istream& in) {
  static constexpr std::array<std::string_view, 3> kCols = {"period", "bank", "total_capital"};
  auto table = read_csv(in, kCols);
  std::vector<CapitalRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& [line_no, f] : table.rows) {
    require_date(f[0], line_no);
    if (f[1].empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty bank id");
    }
    const double cap = parse_number(f[2], line_no, "total_capital");
    if (cap <= 0.0) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": total_capital must be positive");
    }
    if (!seen.emplace(f[0], f[1]).second) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                             ": duplicate capital for " + f[1] + " in " + f[0]);
    }
    out.push_back({std::move(f[0]), std::move(f[1]), cap});
  }
  return out;
}

std::vector<FactorRecord> parse_factors(std::istream& in) {
  static constexpr std::array<std::string_view, 3> kCols = {"period", "factor_name", "value"};
  auto table = read_csv(in, kCols);
  std::vector<FactorRecord> out;
  for (auto& [line_no, f] : table.rows) {
    require_date(f[0], line_no);
    if (f[1].empty()) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": empty factor name");
    }
    const double v = parse_number(f[2], line_no, "value");
    out.push_back({std::move(f[0]), std::move(f[1]), v});
  }
  return out;
}

std::vector<ExposureRecord> apply_sign_policy(std::span<const ExposureRecord> records,
                                              const SignPolicy& policy) {
  std::vector<ExposureRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    double v = r.amount;
    switch (policy.rule_for(r.layer.name)) {
      case SignRule::NonnegativeOnly:
        if (v < 0.0) {
          throw Error(ErrorCode::NegativeAmount, "negative amount " + format_double(v) + " for " +
                                                     r.from_bank + "->" + r.to_bank + " in " +
                                                     r.layer.name);
        }
        break;
      case SignRule::LongOnly: v = std::max(v, 0.0); break;
      case SignRule::ShortOnly: v = std::max(-v, 0.0); break;
      case SignRule::Absolute: v = std::abs(v); break;
    }
    if (v == 0.0) continue;
    auto copy = r;
    copy.amount = v;
    out.push_back(std::move(copy));
  }
  return out;
}

std::vector<std::string> periods_of(std::span<const ExposureRecord> records) {
  std::set<std::string> s;
  for (const auto& r : records) s.insert(r.period);
  return {s.begin(), s.end()};
}

NetworkBundle build_bundle(std::span<const ExposureRecord> records,
                           std::span<const CapitalRecord> capitals, const std::string& period,
                           const InterlayerSpec& interlayer, const LayerRegistry& layers,
                           const SignPolicy& policy) {
  std::vector<ExposureRecord> selected;
  for (const auto& r : records) {
    if (r.period == period) selected.push_back(r);
  }
  if (selected.empty()) {
    throw Error(ErrorCode::EmptyNetwork, "empty network: no exposures for period " + period);
  }
  const auto signed_records = apply_sign_policy(selected, policy);
  if (signed_records.empty()) {
    throw Error(ErrorCode::EmptyNetwork,
                "empty network: every exposure for period " + period + " was dropped");
  }

  std::vector<std::string> ids;
  std::map<std::string, double> capital_of;
  for (const auto& r : selected) {
    ids.push_back(r.from_bank);
    ids.push_back(r.to_bank);
  }
  for (const auto& c : capitals) {
    if (c.period != period) continue;
    ids.push_back(c.bank);
    capital_of[c.bank] = c.total_capital;
  }
  NodeRegistry registry(std::move(ids));

  std::vector<std::vector<DirectedAmount>> per_layer(layers.size());
  for (const auto& r : signed_records) {
    const auto id = layers.at(r.layer.name);
    per_layer[id.index].push_back({r.from_bank, r.to_bank, r.amount});
  }
  std::vector<LayerMatrix> matrices;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    matrices.push_back(build_layer_matrix(per_layer[k], layers.at(k), registry));
  }

  NetworkBundle bundle;
  bundle.period = period;
  for (const auto& id : registry.ids()) {
    auto it = capital_of.find(id);
    bundle.capitals.push_back(it == capital_of.end() ? std::nullopt
                                                     : std::optional<double>(it->second));
  }
  bundle.network = assemble_multilayer(std::move(registry), std::move(matrices), interlayer);
  return bundle;
}

std::string export_network(const NetworkBundle& bundle, ExportFormat format) {
  switch (format) {
    case ExportFormat::Json: return export_json(bundle);
    case ExportFormat::GraphMl: return export_graphml(bundle);
    case ExportFormat::Dot: return export_dot(bundle);
    case ExportFormat::Csv: return export_csv(bundle);
  }
  throw Error(ErrorCode::UnsupportedFormat, "unsupported export format");
}

NetworkBundle import_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid network JSON: ") + e.what());
  }
  try {
    NetworkBundle b;
    b.period = j.at("period").get<std::string>();
    auto ids = j.at("nodes").get<std::vector<std::string>>();
    NodeRegistry registry(ids);
    if (registry.ids() != ids) {
      throw Error(ErrorCode::ParseError, "nodes must be unique and sorted lexicographically");
    }
    const auto names = j.at("layers").get<std::vector<std::string>>();
    const auto layer_reg = LayerRegistry::from_names(names);
    const auto& intra = j.at("intra");
    if (intra.size() != names.size()) {
      throw Error(ErrorCode::ParseError, "intra must hold one entry list per layer");
    }
    const std::size_t n = registry.size();
    std::vector<LayerMatrix> layers;
    for (std::size_t k = 0; k < names.size(); ++k) {
      std::vector<Triplet> t;
      for (const auto& e : intra[k]) {
        t.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(),
                     e.at(2).get<double>()});
      }
      layers.push_back({layer_reg.at(k), CsrMatrix(n, n, std::move(t))});
    }
    std::vector<InterlayerEdge> inter;
    for (const auto& e : j.at("interlayer")) {
      inter.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(),
                       e.at(2).get<std::size_t>(), e.at(3).get<std::size_t>(),
                       e.at(4).get<double>()});
    }
    const bool dimensionless = j.value("dimensionless", false);
    b.network = MultilayerNetwork(std::move(registry), std::move(layers), std::move(inter),
                                  dimensionless);
    if (j.at("multiplex_flag").get<bool>() != b.network.multiplex()) {
      throw Error(ErrorCode::ParseError, "multiplex_flag inconsistent with interlayer entries");
    }
    const auto& caps = j.at("capitals");
    if (!caps.is_array() || (!caps.empty() && caps.size() != n)) {
      throw Error(ErrorCode::ParseError, "capitals must be empty or aligned with nodes");
    }
    for (const auto& c : caps) {
      b.capitals.push_back(c.is_null() ? std::nullopt : std::optional<double>(c.get<double>()));
    }
    if (caps.empty()) b.capitals.assign(n, std::nullopt);
    b.provenance = j.value("provenance", std::vector<std::string>{});
    return b;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed network JSON: ") + e.what());
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::SolverFailure, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

}  // namespace mlnet

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "mlnet/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mlnet::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mlnet_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"nonsense"}).code == 2);
  CHECK(cli({"centrality", "--out", "x.csv"}).code == 2);
  const auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("centrality") != std::string::npos);
}

TEST_CASE("generate, build, analyse") {
  TempDir dir;
  const auto g = cli({"generate", "--n", "12", "--l", "3", "--p", "0.3", "--seed", "5", "--omega", "0.2",
                      "--out", dir / "g.json", "--exposures-out", dir / "e.csv", "--capitals-out",
                      dir / "c.csv"});
  REQUIRE(g.code == 0);

  SUBCASE("generation is deterministic") {
    REQUIRE(cli({"generate", "--n", "12", "--l", "3", "--p", "0.3", "--seed", "5", "--omega", "0.2",
                 "--out", dir / "g2.json"})
                .code == 0);
    CHECK(slurp(dir / "g.json") == slurp(dir / "g2.json"));
  }
  SUBCASE("outputs are not overwritten without --force") {
    const auto again = cli({"generate", "--n", "4", "--out", dir / "g.json"});
    CHECK(again.code == 1);
    CHECK(again.err.rfind("ERROR output_exists:", 0) == 0);
    CHECK(cli({"generate", "--n", "4", "--out", dir / "g.json", "--force"}).code == 0);
  }
  SUBCASE("build from the generated csv files") {
    REQUIRE(cli({"build", "--exposures", dir / "e.csv", "--capitals", dir / "c.csv", "--omega", "0.2",
                 "--sign-policy", "pass-through", "--out", dir / "b.json"})
                .code == 0);
    const auto b = json::parse(slurp(dir / "b.json"));
    CHECK(b["nodes"].size() == 12);
    CHECK(b["layers"].size() == 10);
    CHECK(b["capitals"][0].is_number());
    CHECK(b["provenance"].size() == 2);
  }
  SUBCASE("centrality csv and json") {
    REQUIRE(cli({"centrality", "--network", dir / "g.json", "--measure", "pagerank", "--out", dir / "p.csv"})
                .code == 0);
    const auto csv = slurp(dir / "p.csv");
    CHECK(csv.rfind("bank,score,rank\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);

    REQUIRE(cli({"centrality", "--network", dir / "g.json", "--measure", "eigencentrality", "--scope",
                 "multilayer", "--out", dir / "e.json", "--layer-scores-out", dir / "ls.csv"})
                .code == 0);
    const auto j = json::parse(slurp(dir / "e.json"));
    CHECK(j["meta"]["tool"] == "mlnet");
    CHECK(j["meta"]["inputs"].size() == 1);
    CHECK(j["meta"]["config"]["scope"] == "multilayer");
    CHECK(j["scores"].size() == 12);
    CHECK(slurp(dir / "ls.csv").rfind("bank,UNSECURED_LENDING", 0) == 0);

    REQUIRE(cli({"centrality", "--network", dir / "g.json", "--measure", "composite", "--out",
                 dir / "comp.csv"})
                .code == 0);
  }
  SUBCASE("divergent katz") {
    const auto r = cli({"centrality", "--network", dir / "g.json", "--measure", "katz", "--a", "2.0",
                        "--out", dir / "k.csv"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("ERROR divergent_attenuation:", 0) == 0);
    CHECK_FALSE(fs::exists(dir / "k.csv"));
  }
  SUBCASE("surcharge") {
    // Couplings put 0.2 * 3 * 2 on the projected diagonal, so thresholds must sit above 1.2.
    CHECK(cli({"surcharge", "--network", dir / "g.json", "--threshold", "1.0", "--out", dir / "u.json"})
              .err.rfind("ERROR unstabilizable:", 0) == 0);
    REQUIRE(cli({"surcharge", "--network", dir / "g.json", "--threshold", "1.5", "--out", dir / "s.json",
                 "--csv-out", dir / "s.csv"})
                .code == 0);
    const auto j = json::parse(slurp(dir / "s.json"));
    CHECK(j["lambda_after"].get<double>() <= 1.5 + 1e-8);
    CHECK(j["c_star"].get<double>() > 0.0);
    CHECK(slurp(dir / "s.csv").rfind("bank,surcharge,centrality_weight\n", 0) == 0);
  }
  SUBCASE("surcharge without capitals") {
    write(dir / "x.csv",
          "period,from_bank,to_bank,layer,amount\n2013-06-30,A,B,UNSECURED_LENDING,1\n"
          "2013-06-30,B,A,UNSECURED_LENDING,1\n");
    write(dir / "xc.csv", "period,bank,total_capital\n2013-06-30,A,1\n");
    REQUIRE(cli({"build", "--exposures", dir / "x.csv", "--capitals", dir / "xc.csv", "--out", dir / "x.json"})
                .code == 0);
    const auto r = cli({"surcharge", "--network", dir / "x.json", "--out", dir / "xs.json"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("ERROR capitals_incomplete:", 0) == 0);
    const auto missing = cli({"surcharge", "--network", dir / "x.json", "--capitals", dir / "nope.csv",
                              "--out", dir / "xs.json"});
    CHECK(missing.err.rfind("ERROR io_error:", 0) == 0);
  }
  SUBCASE("diffusion") {
    REQUIRE(cli({"diffusion", "--network", dir / "g.json", "--dx", "0.5", "--t-end", "0.5", "--out",
                 dir / "t.csv", "--report", dir / "d.json"})
                .code == 0);
    const auto j = json::parse(slurp(dir / "d.json"));
    CHECK(j["max_mass_drift"].get<double>() <= 1e-9 * j["initial_mass"].get<double>());
    CHECK(slurp(dir / "t.csv").rfind("t,B000@UNSECURED_LENDING", 0) == 0);
  }
  SUBCASE("export formats") {
    for (const std::string f : {"json", "graphml", "dot", "csv"}) {
      CHECK(cli({"export", "--network", dir / "g.json", "--format", f, "--out", dir / ("x." + f)}).code == 0);
    }
    CHECK(slurp(dir / "x.json") == slurp(dir / "g.json"));
    CHECK(cli({"export", "--network", dir / "g.json", "--format", "xlsx", "--out", dir / "x.xlsx"})
              .err.rfind("ERROR unsupported_format:", 0) == 0);
  }
}

TEST_CASE("timescale and factors") {
  TempDir dir;
  std::ostringstream ex;
  ex << "period,from_bank,to_bank,layer,amount\n";
  const char* periods[] = {"2020-01-31", "2020-02-29", "2020-03-31", "2020-04-30",
                           "2020-05-31", "2020-06-30"};
  for (int t = 0; t < 6; ++t) {
    ex << periods[t] << ",A,B,UNSECURED_LENDING," << 10 + t << "\n";
    ex << periods[t] << ",B,C,UNSECURED_LENDING," << 5 + (t * 7) % 4 << "\n";
    ex << periods[t] << ",C,A,DERIV_FX," << 3 + (t * 3) % 5 << "\n";
    ex << periods[t] << ",D,A,CDS_NET_SOLD," << -(1 + t % 3) << "\n";
  }
  write(dir / "ex.csv", ex.str());
  const auto ts = cli({"timescale", "--exposures", dir / "ex.csv", "--measure", "strength", "--windows", "1,2,3",
                       "--k", "2", "--out", dir / "ts.json"});
  REQUIRE(ts.code == 0);
  const auto j = json::parse(slurp(dir / "ts.json"));
  CHECK(j["windows"].size() == 3);
  CHECK(j["banks"].size() == 4);

  std::ostringstream fac;
  fac << "period,factor_name,value\n";
  for (int t = 0; t < 6; ++t) {
    fac << periods[t] << ",DJI," << 100 + t * t << "\n";
    fac << periods[t] << ",LIBOR_3M," << 0.5 + 0.1 * ((t * 5) % 3) << "\n";
    fac << periods[t] << ",MXN_USD," << 13 - 0.2 * t << "\n";
  }
  write(dir / "f.csv", fac.str());
  const auto f = cli({"factors", "--factors", dir / "f.csv", "--exposures", dir / "ex.csv", "--threshold", "0.8",
                      "--out", dir / "f.json", "--loadings-out", dir / "l.csv"});
  REQUIRE(f.code == 0);
  const auto fj = json::parse(slurp(dir / "f.json"));
  CHECK(fj["regressions"].size() == 3);
  CHECK(slurp(dir / "l.csv").rfind("factor,PC1", 0) == 0);
}

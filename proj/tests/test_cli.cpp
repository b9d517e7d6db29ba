#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pollinet/cli.hpp"
#include "pollinet/config.hpp"
#include "pollinet/errors.hpp"
#include "pollinet/svg.hpp"

using namespace pollinet;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "pollinet_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

const char* kBaseConfig = R"JSON({
  "community": {
    "n": 3, "m": 3,
    "graphon": {"kind": "constant", "phi0": 1.0},
    "harvest": {"kind": "constant", "c0": 2.0, "noiseHalfWidth": 0.0}
  },
  "rates": {"alphaP": 9, "betaP": 1, "gammaP": 1, "dP": 1, "deltaP": 3,
            "alphaA": 25, "betaA": 1, "gammaA": 1, "dA": 2},
  "kernels": {"plant": {"kind": "constant", "value": 1.0},
              "pollinator": {"kind": "constant", "value": 10.0}},
  "scale": {"K": 50, "gridN": 16},
  "schedule": {"tEnd": 0.5, "recordEvery": 0.25, "replicas": 2},
  "init": {"plants": 0.6, "pollinators": 0.75,
           "plantDensity": {"kind": "constant", "value": 6.0},
           "pollDensity": {"kind": "constant", "value": 2.0}},
  "pair": {"c": 1.0, "k": 1.0, "h": 1.0},
  "fluctuations": {"dt": 0.01, "ouPaths": 4},
  "study": {"ns": [4, 6], "Ks": [20, 80], "seedsPerCell": 2},
  "seed": 7
})JSON";
}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("missing required field is reported by its dotted path") {
        Config cfg = Config::from_json_text(R"({"rates": {"betaP": 1.0}})");
        try {
            cfg.rates();
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("rates.alphaP") != std::string::npos);
        }
    }

    TEST_CASE("parse errors carry the line number") {
        try {
            Config::from_json_text("{\n  \"a\": 1,\n  oops\n}", "bad.json");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("bad.json:3") != std::string::npos);
        }
    }

    TEST_CASE("explicit community round-trips through the config") {
        Config cfg = Config::from_json_text(R"({
          "community": {"kind": "explicit", "x": [0.25, 0.5], "y": [0.4],
                        "adjacency": [[1], [0]], "weights": [[0.7], [0.3]]},
          "seed": 3
        })");
        const Community comm = community_from_config(cfg);
        CHECK(comm.n == 2);
        CHECK(comm.m == 1);
        CHECK(comm.edge(0, 0));
        CHECK_FALSE(comm.edge(1, 0));
        CHECK(comm.weight(0, 0) == 0.7);
        CHECK(comm.plant_neighbors[0] == std::vector<int>{0});
    }

    TEST_CASE("power trait CDF inverse parses and biases traits") {
        Config cfg = Config::from_json_text(R"({
          "community": {"n": 2000, "m": 2,
            "graphon": {"kind": "constant", "phi0": 0.0},
            "harvest": {"kind": "constant", "c0": 1.0},
            "plantTraitCdfInverse": {"kind": "power", "exponent": 2.0}},
          "seed": 10
        })");
        const Community comm = community_from_config(cfg);
        double mean_x = 0.0;
        for (double v : comm.x) mean_x += v;
        mean_x /= comm.n;
        // u^2 has mean 1/3
        CHECK(mean_x == doctest::Approx(1.0 / 3.0).epsilon(0.05));
    }

    TEST_CASE("tabulated kernels parse from the config") {
        Config cfg = Config::from_json_text(R"({
          "kernels": {"plant": {"kind": "tabulated", "values": [[0.1, 0.2], [0.2, 0.3]]},
                      "pollinator": {"kind": "constant", "value": 1.5}}
        })");
        const Kernels k = cfg.kernels();
        CHECK_FALSE(k.plant.is_constant());
        CHECK(k.plant(0.0, 0.0) == doctest::Approx(0.1));
        CHECK(k.plant(1.0, 1.0) == doctest::Approx(0.3));
        CHECK(k.poll.is_constant());
    }

    TEST_CASE("svg output is deterministic and survives empty input") {
        svg::PlotOptions opt;
        opt.title = "demo";
        const std::vector<svg::Series> series{{"s", {{0.0, 1.0}, {1.0, 3.0}, {2.0, 2.0}}}};
        CHECK(svg::render_lines(series, opt) == svg::render_lines(series, opt));
        const std::string empty = svg::render_lines({}, opt);
        CHECK(empty.find("<svg") != std::string::npos);
        CHECK(empty.find("<rect") != std::string::npos);  // axes frame still drawn
        CHECK(empty.find("</svg>") != std::string::npos);
    }

    TEST_CASE("analyze-pair writes a report with the documented assumption") {
        const fs::path dir = scratch_dir("pair");
        const fs::path cfg_path = dir / "config.json";
        write_file(cfg_path, kBaseConfig);
        const int rc = run_cli({"pollinet", "analyze-pair", "--config", cfg_path.string(), "--out",
                                (dir / "out").string()});
        REQUIRE(rc == 0);
        const std::string report = slurp(dir / "out" / "equilibrium_report.json");
        CHECK(report.find("\"positiveCount\": 2") != std::string::npos);
        // three stationary states in total: null + two positive
        const Config parsed = Config::from_file((dir / "out" / "equilibrium_report.json").string());
        CHECK(parsed.raw()["equilibria"].size() == 3);
        CHECK(report.find("assumption") != std::string::npos);
        CHECK(fs::exists(dir / "out" / "nullclines.csv"));
        CHECK(fs::exists(dir / "out" / "phase_plane.svg"));
        CHECK(fs::exists(dir / "out" / "growth_rates.svg"));
        CHECK(fs::exists(dir / "out" / "resolved_config.json"));
    }

    TEST_CASE("sample-graph, integrate-ode, simulate-ibm, solve-kinetic produce their artifacts") {
        const fs::path dir = scratch_dir("smoke");
        const fs::path cfg_path = dir / "config.json";
        write_file(cfg_path, kBaseConfig);

        REQUIRE(run_cli({"pollinet", "sample-graph", "--config", cfg_path.string(), "--out",
                         (dir / "graph").string()}) == 0);
        CHECK(fs::exists(dir / "graph" / "community.json"));
        CHECK(fs::exists(dir / "graph" / "edges.csv"));
        CHECK(slurp(dir / "graph" / "edges.csv").rfind("i,j,weight\n", 0) == 0);

        REQUIRE(run_cli({"pollinet", "integrate-ode", "--config", cfg_path.string(), "--out",
                         (dir / "ode").string()}) == 0);
        const std::string csv = slurp(dir / "ode" / "ode.csv");
        CHECK(csv.rfind("t,P_1,P_2,P_3,A_1,A_2,A_3\n", 0) == 0);

        REQUIRE(run_cli({"pollinet", "simulate-ibm", "--config", cfg_path.string(), "--out",
                         (dir / "ibm").string()}) == 0);
        CHECK(fs::exists(dir / "ibm" / "ibm_000.csv"));
        CHECK(fs::exists(dir / "ibm" / "ibm_001.csv"));
        CHECK(fs::exists(dir / "ibm" / "ibm_000.meta.json"));

        REQUIRE(run_cli({"pollinet", "solve-kinetic", "--config", cfg_path.string(), "--out",
                         (dir / "kin").string()}) == 0);
        CHECK(fs::exists(dir / "kin" / "collapse_report.json"));
        CHECK(slurp(dir / "kin" / "kinetic_000.csv").rfind("x,p,a\n", 0) == 0);
        // three record times -> three colored curves per density panel
        const std::string svg_text = slurp(dir / "kin" / "densities.svg");
        for (const char* color : {"#1f77b4", "#ff7f0e", "#2ca02c"})
            CHECK(svg_text.find(color) != std::string::npos);
        std::size_t polylines = 0;
        for (std::size_t pos = svg_text.find("<polyline"); pos != std::string::npos;
             pos = svg_text.find("<polyline", pos + 1))
            ++polylines;
        CHECK(polylines == 6);
    }

    TEST_CASE("simulate-fluctuations emits the moment summary") {
        const fs::path dir = scratch_dir("fluct");
        const fs::path cfg_path = dir / "config.json";
        write_file(cfg_path, kBaseConfig);
        REQUIRE(run_cli({"pollinet", "simulate-fluctuations", "--config", cfg_path.string(), "--out",
                         (dir / "out").string()}) == 0);
        const std::string summary = slurp(dir / "out" / "fluctuations_summary.json");
        CHECK(summary.find("empiricalMean") != std::string::npos);
        CHECK(summary.find("empiricalVar") != std::string::npos);
        CHECK(summary.find("ouVar") != std::string::npos);
        CHECK(fs::exists(dir / "out" / "eta_empirical.csv"));
        CHECK(fs::exists(dir / "out" / "ou_000.csv"));
    }

    TEST_CASE("lln-study and convergence-study write tables and plots") {
        const fs::path dir = scratch_dir("studies");
        const fs::path cfg_path = dir / "config.json";
        write_file(cfg_path, kBaseConfig);
        REQUIRE(run_cli({"pollinet", "lln-study", "--config", cfg_path.string(), "--replicas", "30",
                         "--t-end", "1.0", "--out", (dir / "lln").string()}) == 0);
        const std::string lln = slurp(dir / "lln" / "lln.csv");
        CHECK(lln.rfind("K,rmsSupError\n", 0) == 0);
        CHECK(fs::exists(dir / "lln" / "lln.svg"));
        // the error column decreases along the K ladder
        const Config lln_json = Config::from_file((dir / "lln" / "lln.json").string());
        const auto rms = lln_json.number_list("rmsSupError");
        REQUIRE(rms.size() == 2);
        CHECK(rms[0] > rms[1]);

        REQUIRE(run_cli({"pollinet", "convergence-study", "--config", cfg_path.string(), "--out",
                         (dir / "conv").string()}) == 0);
        const std::string conv = slurp(dir / "conv" / "convergence.csv");
        CHECK(conv.rfind("n,t,meanW1Plants,meanW1Pollinators\n", 0) == 0);
        CHECK(fs::exists(dir / "conv" / "convergence.json"));
    }

    TEST_CASE("re-running a resolved config reproduces every data artifact byte for byte") {
        const fs::path dir = scratch_dir("repro");
        const fs::path cfg_path = dir / "config.json";
        write_file(cfg_path, kBaseConfig);
        REQUIRE(run_cli({"pollinet", "lln-study", "--config", cfg_path.string(), "--out",
                         (dir / "a").string()}) == 0);
        // replay from the emitted resolved config into a fresh directory
        REQUIRE(run_cli({"pollinet", "lln-study", "--config", (dir / "a" / "resolved_config.json").string(),
                         "--out", (dir / "b").string()}) == 0);
        int compared = 0;
        for (const auto& entry : fs::directory_iterator(dir / "a")) {
            if (entry.path().filename() == "resolved_config.json") continue;  // carries the out path
            const fs::path twin = dir / "b" / entry.path().filename();
            REQUIRE(fs::exists(twin));
            CHECK(slurp(entry.path()) == slurp(twin));
            ++compared;
        }
        CHECK(compared >= 3);
    }

    TEST_CASE("flags override config fields and land in the resolved config") {
        const fs::path dir = scratch_dir("override");
        const fs::path cfg_path = dir / "config.json";
        write_file(cfg_path, kBaseConfig);
        REQUIRE(run_cli({"pollinet", "integrate-ode", "--config", cfg_path.string(), "--out",
                         (dir / "out").string(), "--seed", "99", "--t-end", "0.25"}) == 0);
        const Config resolved = Config::from_file((dir / "out" / "resolved_config.json").string());
        CHECK(resolved.seed() == 99);
        CHECK(resolved.number("schedule.tEnd") == 0.25);
    }

    TEST_CASE("bad config yields a config error exit code") {
        const fs::path dir = scratch_dir("bad");
        const fs::path cfg_path = dir / "config.json";
        write_file(cfg_path, R"({"rates": {}, "seed": 1, "out": ")" + (dir / "out").string() + "\"}");
        CHECK(run_cli({"pollinet", "integrate-ode", "--config", cfg_path.string()}) == 2);
    }
}

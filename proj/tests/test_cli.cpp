#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include <unistd.h>

#include "fluxq/analytic.hpp"
#include "fluxq/commands.hpp"
#include "fluxq/config.hpp"
#include "fluxq/csv.hpp"
#include "fluxq/errors.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace fluxq;
using fluxq::testing::Gen;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("fluxq_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fluxq");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("property: floats round-trip through the CSV formatter") {
    Gen g(61);
    for (int i = 0; i < 20000; ++i) {
        const double v = std::ldexp(g.uniform(-1.0, 1.0), g.integer(-300, 300));
        CHECK(parse_double(format_double(v)) == v);
    }
    for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 5e-324, 1.7976931348623157e308}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(std::isnan(parse_double(format_double(std::nan("")))));
    CHECK_THROWS(parse_double("1.5x"));
}

TEST_CASE("config JSON round trip and strictness") {
    RunConfig c;
    c.field = "f2";
    c.omega = 0.205;
    c.z_eq = -0.25;
    c.closed_form = true;
    c.scan_steps = 7;
    CHECK(parse_config(dump_config(c)) == c);
    CHECK(parse_config("{}") == RunConfig{});
    CHECK(parse_config(R"({"delta": 0.4, "t-max": 10})").t_max == 10.0);
    CHECK_THROWS_AS(parse_config(R"({"dleta": 0.4})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"delta": "big"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"field": "f9"})"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/fluxq.json"), ConfigError);
}

TEST_CASE("every config key is also a flag") {
    for (const auto& f : run_config_fields()) {
        const Run r = cli({"simulate", "--help"});
        CHECK(r.out.find("--" + std::string(f.key)) != std::string::npos);
    }
}

TEST_CASE("scan grid") {
    RunConfig c;
    c.scan_min = 0.0;
    c.scan_max = 1.0;
    c.scan_steps = 5;
    const auto g = scan_grid_from_config(c);
    REQUIRE(g.size() == 5);
    CHECK(g[1] == 0.25);
    CHECK(g.back() == 1.0);
}

TEST_CASE("simulate writes a re-parseable trajectory CSV") {
    TempDir tmp;
    const std::string path = tmp.file("t.csv");
    const Run r = cli({"simulate", "--field", "f1", "--delta", "0.866", "--t-max", "5", "--out", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("max_residual=") != std::string::npos);
    std::ifstream in(path);
    const CsvTable table = read_csv(in);
    CHECK(table.rows.size() == 501);
    CHECK(table.header.back() == "p_down_analytic");
    const auto pd = table.numeric_column("p_down");
    const auto pu = table.numeric_column("p_up");
    for (std::size_t i = 0; i < pd.size(); ++i) CHECK(pd[i] + pu[i] == 1.0);
    CHECK(slurp(path).find("\r") == std::string::npos);
    CHECK_FALSE(fs::exists(path + ".partial"));
}

TEST_CASE("identical runs give byte-identical files") {
    TempDir tmp;
    const std::vector<std::string> base{"--field", "f2", "--omega", "0.205", "--delta", "0.9",
                                        "--gamma-phi", "0.02", "--t-max", "10"};
    auto args = [&](const std::string& out) {
        std::vector<std::string> a{"simulate"};
        a.insert(a.end(), base.begin(), base.end());
        a.push_back("--out");
        a.push_back(out);
        return a;
    };
    REQUIRE(cli(args(tmp.file("a.csv"))).code == 0);
    REQUIRE(cli(args(tmp.file("b.csv"))).code == 0);
    CHECK(slurp(tmp.file("a.csv")) == slurp(tmp.file("b.csv")));

    const std::vector<std::string> scan{"scan", "--scan-param", "delta", "--scan-min", "0.2",
                                        "--scan-max", "1.2", "--scan-steps", "6", "--t-max", "10"};
    auto s1 = scan;
    s1.insert(s1.end(), {"--workers", "1", "--out", tmp.file("s1.csv")});
    auto s2 = scan;
    s2.insert(s2.end(), {"--workers", "4", "--out", tmp.file("s2.csv")});
    REQUIRE(cli(s1).code == 0);
    REQUIRE(cli(s2).code == 0);
    CHECK(slurp(tmp.file("s1.csv")) == slurp(tmp.file("s2.csv")));
}

TEST_CASE("flags override config file values") {
    TempDir tmp;
    const std::string cfg = tmp.file("run.json");
    std::ofstream(cfg) << R"({"field": "f3", "delta": 0.3, "t-max": 2, "out": ")" +
                              tmp.file("cfg.csv") + "\"}";
    const Run r = cli({"simulate", "--config", cfg, "--delta", "0.7"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("field=f3 delta=0.7 ") != std::string::npos);
    CHECK(fs::exists(tmp.file("cfg.csv")));
}

TEST_CASE("exit codes") {
    TempDir tmp;
    CHECK(cli({}).code == 2);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"simulate", "--bogus"}).code == 2);
    CHECK(cli({"simulate", "--delta", "abc"}).code == 2);
    CHECK(cli({"simulate", "--field", "f2", "--omega", "0.6", "--out", tmp.file("x.csv")}).code == 2);
    CHECK(cli({"simulate", "--config", tmp.file("missing.json")}).code == 2);
    CHECK(cli({"critical", "--field", "f2"}).code == 2);
    CHECK(cli({"critical", "--field", "f3"}).code == 0);
    CHECK(cli({"scan", "--metric", "nope"}).code == 2);

    // an integration failure leaves no file behind
    const std::string path = tmp.file("fail.csv");
    const Run r = cli({"simulate", "--max-steps", "5", "--out", path});
    CHECK(r.code == 1);
    CHECK(r.err.find("step budget") != std::string::npos);
    CHECK_FALSE(fs::exists(path));
    CHECK_FALSE(fs::exists(path + ".partial"));

    // every scan point failing is a failure; some failing is not
    CHECK(cli({"scan", "--field", "f2", "--scan-param", "omega", "--scan-min", "0.6",
               "--scan-max", "0.8", "--scan-steps", "3", "--t-max", "2", "--out",
               tmp.file("s.csv")})
              .code == 1);
    CHECK(cli({"scan", "--field", "f2", "--scan-param", "omega", "--scan-min", "0.3",
               "--scan-max", "0.7", "--scan-steps", "3", "--t-max", "2", "--out",
               tmp.file("s.csv")})
              .code == 0);
}

TEST_CASE("scan CSV content") {
    TempDir tmp;
    const std::string path = tmp.file("scan.csv");
    REQUIRE(cli({"scan", "--scan-param", "delta", "--scan-min", "0.1", "--scan-max", "2",
                 "--scan-steps", "5", "--metric", "avg-exact", "--out", path})
                .code == 0);
    std::ifstream in(path);
    const CsvTable t = read_csv(in);
    CHECK(t.header == std::vector<std::string>{"param_value", "metric_value", "status"});
    REQUIRE(t.rows.size() == 5);
    CHECK(parse_double(t.rows[2][1]) == doctest::Approx(0.708930542126069));
}

TEST_CASE("validate passes on the default grid and fails on a faulty closed form") {
    std::ostringstream out;
    std::ostringstream err;
    CHECK(cmd_validate({}, out, err) == 0);
    CHECK(default_validation_grid().size() == 22);

    ValidateOptions broken;
    broken.t_max = 10.0;
    broken.closed_form = [](const FieldSpec& f, double d, double t) {
        return closed_form_p_down(f, d, t) * (1.0 + 1e-4);
    };
    std::ostringstream o2;
    std::ostringstream e2;
    CHECK(cmd_validate(broken, o2, e2) == 1);
    CHECK(e2.str().find("validation failed") != std::string::npos);
}

TEST_CASE("critical subcommand output") {
    const Run r = cli({"critical", "--field", "f1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("theta=2 ") != std::string::npos);
    CHECK(r.out.find("delta=0.8660254037844386") != std::string::npos);
}

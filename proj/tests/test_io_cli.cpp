#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "obscert/cli.hpp"
#include "obscert/io.hpp"
#include "obscert/spectral.hpp"

using namespace obscert;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("obscert_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("field binary round trip is exact") {
    TempDir tmp;
    const GridSpec grid(2, 32, 6.5);
    const Field f = white_field(grid, 77);
    const fs::path p = tmp.path / "f.obsf";
    io::write_field(p, f);
    CHECK(fs::exists(tmp.path / "f.obsf.json"));

    const Field g = io::read_field(p);
    CHECK(g.grid == f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == f.values[i]);

    CHECK_THROWS_AS(io::read_field(tmp.path / "missing.obsf"), IoError);
    std::ofstream(tmp.path / "junk.obsf") << "not a field";
    CHECK_THROWS_AS(io::read_field(tmp.path / "junk.obsf"), IoError);
}

TEST_CASE("mask PBM round trip") {
    TempDir tmp;
    const GridSpec grid(2, 32, 4.0);
    const Mask m = gen_random(grid, 0.4, 5);
    const fs::path p = tmp.path / "m.pbm";
    io::write_mask(p, m);
    const Mask back = io::read_mask_pbm(p, grid);
    CHECK(back.bits == m.bits);
    CHECK(slurp(p).substr(0, 2) == "P1");

    // 3-d masks fall back to the field container.
    const GridSpec g3(3, 8, 2.0);
    const Mask m3 = gen_random(g3, 0.5, 6);
    io::write_mask(tmp.path / "m3.obsf", m3);
    const Field f3 = io::read_field(tmp.path / "m3.obsf");
    for (std::size_t i = 0; i < m3.bits.size(); ++i)
        CHECK(f3.values[i].real() == (m3.bits[i] ? 1.0 : 0.0));
}

TEST_CASE("csv output carries full double precision") {
    io::CsvWriter csv({"a", "b"});
    csv.add_row({1.0 / 3.0, 2.0});
    csv.add_row({1e-300, -0.0});
    const std::string s = csv.str();
    CHECK(s.substr(0, 4) == "a,b\n");
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(s.find("1e-300") != std::string::npos);
}

TEST_CASE("experiment runner: config validation") {
    TempDir tmp;
    cli::RunOptions opts;
    opts.out_dir = tmp.path;

    // Unknown top-level field.
    CHECK(cli::run_experiment(nlohmann::json{{"command", "cert"}, {"bogus", 1}}, opts) ==
          cli::kInvalidConfig);
    // Unknown params field.
    CHECK(cli::run_experiment(
              nlohmann::json{{"command", "cert"}, {"params", {{"oops", 1}}}}, opts) ==
          cli::kInvalidConfig);
    // Unknown command.
    CHECK(cli::run_experiment(nlohmann::json{{"command", "frobnicate"}}, opts) ==
          cli::kInvalidConfig);
    // Missing required parameter.
    CHECK(cli::run_experiment(
              nlohmann::json{{"command", "cert"},
                             {"params", {{"abstract", {{"M", 1.0}}}}}},
              opts) == cli::kInvalidConfig);
    // Out-of-range parameter.
    nlohmann::json bad{{"command", "thickness"},
                       {"params",
                        {{"d", 2},
                         {"grid", {{"N", 48}, {"box", 4.0}}},  // N not a power of two
                         {"mask", {{"family", "full"}}},
                         {"L", {1.0, 1.0}}}}};
    CHECK(cli::run_experiment(bad, opts) == cli::kInvalidConfig);
}

TEST_CASE("experiment runner: cert writes a bundle and a manifest") {
    TempDir tmp;
    cli::RunOptions opts;
    opts.out_dir = tmp.path;
    const nlohmann::json config{
        {"command", "cert"},
        {"seed", 9},
        {"params",
         {{"abstract",
           {{"M", 1.0}, {"d0", 1.0}, {"d1", 1.0}, {"gamma1", 1.0}, {"d2", 1.0},
            {"d3", 1.0}, {"gamma2", 2.0}, {"gamma3", 1.0}, {"T", 1.0}, {"r", 1.0}}}}}};
    CHECK(cli::run_experiment(config, opts) == cli::kOk);

    const auto bundle = nlohmann::json::parse(slurp(tmp.path / "cert_bundle.json"));
    CHECK(bundle.at("schema") == "obscert.cert_bundle.v1");
    CHECK(bundle.at("C2").get<double>() == doctest::Approx(512.0));

    const auto manifest = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
    CHECK(manifest.at("command") == "cert");
    CHECK(manifest.at("seed") == 9);
    CHECK(manifest.at("exit_code") == 0);
    CHECK(!manifest.at("config_hash").get<std::string>().empty());
}

TEST_CASE("experiment runner: thickness artifacts and seed override") {
    TempDir tmp;
    cli::RunOptions opts;
    opts.out_dir = tmp.path;
    opts.seed = 1234;
    opts.seed_override = true;
    const nlohmann::json config{{"command", "thickness"},
                                {"seed", 1},
                                {"params",
                                 {{"d", 2},
                                  {"grid", {{"N", 32}, {"box", 4.0}}},
                                  {"mask", {{"family", "stripes"}, {"duty", 0.5},
                                            {"period_cells", 4}}},
                                  {"L", {0.5, 0.5}}}}};
    CHECK(cli::run_experiment(config, opts) == cli::kOk);
    const auto rep = nlohmann::json::parse(slurp(tmp.path / "thickness.json"));
    CHECK(rep.at("rho").get<double>() == doctest::Approx(0.5));
    CHECK(rep.at("is_thick") == true);
    CHECK(fs::exists(tmp.path / "mask.pbm"));
    const auto manifest = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
    CHECK(manifest.at("seed") == 1234);  // command line wins over the config
}

TEST_CASE("experiment runner: dissipation verification passes on a sane grid") {
    TempDir tmp;
    cli::RunOptions opts;
    opts.out_dir = tmp.path;
    const nlohmann::json config{{"command", "verify-diss"},
                                {"params",
                                 {{"symbol", {{"kind", "laplacian"}, {"d", 1}}},
                                  {"grid", {{"N", 128}, {"box", 16.0}}},
                                  {"lambdas", {4.0, 8.0}},
                                  {"times", {0.25, 1.0}}}}};
    CHECK(cli::run_experiment(config, opts) == cli::kOk);
    const std::string csv = slurp(tmp.path / "dissipation.csv");
    CHECK(csv.substr(0, csv.find('\n')) == "lambda,t,measured_sup,bound,margin");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 rows
}

TEST_CASE("experiment runner file front end") {
    TempDir tmp;
    cli::RunOptions opts;
    opts.out_dir = tmp.path / "out";

    const fs::path cfg = tmp.path / "cfg.json";
    std::ofstream(cfg) << R"({"command":"thickness","params":{"d":1,)"
                       << R"("grid":{"N":32,"box":4.0},)"
                       << R"("mask":{"family":"holed","radius":1.0,"center":[2.0]},)"
                       << R"("L":[4.0]}})";
    CHECK(cli::run_experiment_file(cfg, opts) == cli::kOk);
    CHECK(fs::exists(opts.out_dir / "thickness.json"));

    CHECK(cli::run_experiment_file(tmp.path / "missing.json", opts) == cli::kIoError);
    std::ofstream(tmp.path / "broken.json") << "{ not json";
    CHECK(cli::run_experiment_file(tmp.path / "broken.json", opts) == cli::kInvalidConfig);
}

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "potlab/errors.hpp"
#include "potlab/experiments.hpp"
#include "potlab/svg.hpp"

using namespace potlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

size_t count(const std::string& text, const std::string& needle) {
    size_t c = 0;
    for (size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++c;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("potlab_test_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig small_prop1() {
    ExperimentConfig cfg = ExperimentConfig::defaults(ExperimentKind::prop1);
    cfg.n_max = 5;
    cfg.n_list = {2, 3, 4, 5};
    cfg.bits = 768;
    cfg.leja_grid = 1024;
    cfg.plot = true;
    return cfg;
}

}  // namespace

TEST_CASE("experiment names") {
    CHECK(experiment_from_name("stahl-circle") == ExperimentKind::stahl_circle);
    CHECK(experiment_from_name("stahl_segment") == ExperimentKind::stahl_segment);
    CHECK(experiment_name(ExperimentKind::leja_only) == "leja");
    CHECK_THROWS_AS(experiment_from_name("prop2"), ConfigError);
}

TEST_CASE("configuration validation") {
    ExperimentConfig cfg = ExperimentConfig::defaults(ExperimentKind::prop1);
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.bits == 2048);
    CHECK(cfg.q == 0.4);

    ExperimentConfig too_far = cfg;
    too_far.n_list.push_back(11);
    CHECK_THROWS_AS(too_far.validate(), ConfigError);

    ExperimentConfig bad_q = cfg;
    bad_q.q = 0.6;
    CHECK_THROWS_AS(bad_q.validate(), ConfigError);

    ExperimentConfig circle = ExperimentConfig::defaults(ExperimentKind::stahl_circle);
    circle.q = 0.6;  // q only constrains prop1
    CHECK_NOTHROW(circle.validate());
    circle.rho = 1.0;
    CHECK_THROWS_AS(circle.validate(), ConfigError);
    circle.rho = 1.5;
    circle.eps = 0.0;
    CHECK_THROWS_AS(circle.validate(), ConfigError);

    ExperimentConfig cap = ExperimentConfig::defaults(ExperimentKind::capacity_only);
    cap.region = {{"kind", "lune"}, {"n", 20}};
    CHECK_NOTHROW(cap.validate());
    cap.region = {{"kind", "torus"}};
    CHECK_THROWS_AS(cap.validate(), ConfigError);
}

TEST_CASE("JSON configuration") {
    ExperimentConfig cfg = ExperimentConfig::defaults(ExperimentKind::stahl_circle);
    apply_config(cfg, json::parse(R"({"experiment":"stahl_circle","eps":0.2,"n_list":[4,8],"z_samples":[2,[0,3]]})"));
    CHECK(cfg.eps == 0.2);
    CHECK(cfg.n_list == std::vector<int>{4, 8});
    CHECK(cfg.z_samples.size() == 2);
    CHECK(cfg.z_samples[1] == cdouble(0.0, 3.0));
    CHECK_THROWS_AS(apply_config(cfg, json::parse(R"({"epsilon":0.2})")), ConfigError);
    CHECK_THROWS_AS(apply_config(cfg, json::parse(R"({"experiment":"prop1"})")), ConfigError);
    CHECK_THROWS_AS(apply_config(cfg, json::parse(R"({"eps":"small"})")), ConfigError);
    CHECK_THROWS_AS(apply_config(cfg, json::parse("[1,2]")), ConfigError);

    const json j = cfg.to_json();
    CHECK(j.at("experiment") == "stahl_circle");
    CHECK(!j.contains("out"));
}

TEST_CASE("random sample points") {
    ExperimentConfig cfg = ExperimentConfig::defaults(ExperimentKind::prop1);
    cfg.random_samples = 50;
    cfg.seed = 42;
    const std::vector<cdouble> a = sample_points(cfg);
    const std::vector<cdouble> b = sample_points(cfg);
    REQUIRE(a.size() == 51);
    CHECK(a == b);
    for (size_t k = 1; k < a.size(); ++k) {
        CHECK(std::abs(a[k]) >= 1.5);
        CHECK(std::abs(a[k]) <= 3.0);
    }
    cfg.seed = 43;
    CHECK(sample_points(cfg) != a);
}

TEST_CASE("circle potential gap") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rad(1.0, 1.5);
    std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
    for (int n : {4, 16, 64}) {
        for (int k = 0; k < 200; ++k) {
            const cdouble z = std::polar(rad(rng), ang(rng));
            // Direct oracle: (1/n) sum log(1/|z - w_k|) + log|z|.
            double direct = 0.0;
            for (int j = 0; j < n; ++j) direct -= std::log(std::abs(z - std::polar(1.0, 2 * std::numbers::pi * j / n)));
            direct = direct / n + std::log(std::abs(z));
            CHECK(std::abs(circle_potential_gap(n, z) - direct) < 1e-12);
            CHECK(std::abs(circle_potential_gap_closed(n, z) - direct) < 1e-10);
        }
    }
}

TEST_CASE("preimage points of the lune lie in E_n") {
    const double eps = 0.1;
    for (int n : {4, 8, 16}) {
        // z^n = 1 + e^{-n eps}: |z^n - 1| = e^{-n eps} and |z^n| >= 1.
        const double z = std::pow(1.0 + std::exp(-n * eps), 1.0 / n);
        CHECK(z >= 1.0);
        CHECK(std::abs(circle_potential_gap(n, z)) >= eps);

        const std::vector<cdouble> tilde = circle_tilde_samples(n, eps);
        CHECK(!tilde.empty());
        for (const cdouble& w : tilde) {
            CHECK(std::abs(w) >= 1.0);
            CHECK(std::abs(circle_potential_gap(n, w)) >= eps);
        }
    }
}

TEST_CASE("segment potential gap and preimage samples") {
    for (int n : {8, 32}) {
        for (const cdouble& z : {cdouble(1.2, 0.1), cdouble(0.0, 0.5), cdouble(-1.1, -0.2)}) {
            double direct = 0.0;
            for (double x : chebyshev_zeros(n)) direct -= std::log(std::abs(z - x));
            direct /= n;
            const double eq = std::log(2.0) - std::log(std::abs(phi(z)));
            CHECK(std::abs(segment_potential_gap(n, z) - (direct - eq)) < 1e-12);
        }
    }
    const std::vector<cdouble> tilde = segment_tilde_samples(32, 0.1);
    CHECK(!tilde.empty());
    for (const cdouble& z : tilde) {
        CHECK(std::abs(phi(z)) <= 1.5);
        CHECK(std::abs(segment_potential_gap(32, z)) >= 0.1);
    }
}

TEST_CASE("bad-set samples") {
    ExperimentConfig cfg = ExperimentConfig::defaults(ExperimentKind::stahl_circle);
    cfg.polar_angular = 256;
    cfg.polar_radial = 64;
    const BadSetSample c = sample_circle_bad_set(cfg, 16);
    CHECK(c.grid_size == 256 * 64);
    CHECK(c.inclusion_certificate == c.tilde_samples);
    CHECK(c.tilde_samples > 0);
    for (const cdouble& z : c.points) {
        CHECK(std::abs(z) >= 1.0);
        CHECK(std::abs(z) <= cfg.rho);
        CHECK(std::abs(circle_potential_gap(16, z)) >= cfg.eps);
    }

    ExperimentConfig seg = ExperimentConfig::defaults(ExperimentKind::stahl_segment);
    seg.polar_angular = 256;
    seg.polar_radial = 64;
    const BadSetSample s = sample_segment_bad_set(seg, 16);
    CHECK(s.inclusion_certificate == s.tilde_samples);
    for (const cdouble& z : s.points) {
        CHECK(std::abs(phi(z)) <= seg.rho * (1 + 1e-12));
        CHECK(std::abs(segment_potential_gap(16, z)) >= seg.eps);
    }
}

TEST_CASE("circle experiment") {
    ExperimentConfig cfg = ExperimentConfig::defaults(ExperimentKind::stahl_circle);
    cfg.n_list = {4, 16};
    const ExperimentReport rep = run_stahl_circle(cfg);
    CHECK(rep.pass());
    const json& per_n = rep.summary.at("per_n");
    CHECK(per_n[0].at("ks").get<double>() == doctest::Approx(0.25).epsilon(1e-12));
    const double b16 = std::pow(0.25, 1.0 / 16) * std::exp(-0.1);
    CHECK(per_n[1].at("bound_analytic").get<double>() == b16);
    CHECK(b16 == doctest::Approx(0.82974).epsilon(1e-5));
    for (const char* key : {"n", "ks", "bound_analytic", "cap_estimate", "max_zero_deviation", "residuals"}) {
        CHECK(per_n[0].contains(key));
    }
    CHECK(rep.summary.at("pass") == true);
    CHECK(rep.files.count("bad_set.csv") == 1);
}

TEST_CASE("segment experiment") {
    ExperimentConfig cfg = ExperimentConfig::defaults(ExperimentKind::stahl_segment);
    cfg.n_list = {8, 50};
    cfg.polar_angular = 256;
    cfg.polar_radial = 64;
    const ExperimentReport rep = run_stahl_segment(cfg);
    CHECK(rep.pass());
    const json& per_n = rep.summary.at("per_n");
    CHECK(per_n[1].at("ks").get<double>() < 0.03);
    CHECK(per_n[0].at("bound_analytic").get<double>() == doctest::Approx(0.45242).epsilon(1e-5));
    CHECK(per_n[0].at("bound_analytic") == per_n[1].at("bound_analytic"));
    CHECK(per_n[0].at("cap_relative_error").get<double>() < 0.05);
}

TEST_CASE("SVG output") {
    const std::string empty = svg::scatter("empty", {}, {});
    CHECK(empty.rfind("<svg", 0) == 0);
    CHECK(empty.find("</svg>\n") == empty.size() - 7);
    CHECK(count(empty, "<line") == 2);
    CHECK(count(empty, "<circle") == 0);

    svg::PointSeries pts{"leja", "#1f77b4", {}};
    for (int k = 0; k < 200; ++k) pts.points.emplace_back(std::cos(k * 0.1), 0.0);
    pts.points[0] = {-1.0, -1.0};
    pts.points[1] = {1.0, 1.0};
    const std::string sc = svg::scatter("points", {pts}, {-1.0, 1.0, -1.0, 1.0});
    CHECK(count(sc, "<circle") == 200);
    // Corners of [-1,1]^2 land on the corners of the plot area.
    CHECK(sc.find("cx=\"60.00\" cy=\"430.00\"") != std::string::npos);
    CHECK(sc.find("cx=\"620.00\" cy=\"40.00\"") != std::string::npos);
    CHECK(sc == svg::scatter("points", {pts}, {-1.0, 1.0, -1.0, 1.0}));

    const std::string lc = svg::line_chart("residuals", {{"r", "black", {5, 10, 20}, {0.1, 0.01, 0.001}}}, true);
    CHECK(count(lc, "<polyline") == 1);
    const size_t at = lc.find("points=\"");
    const std::string pl = lc.substr(at + 8, lc.find('"', at + 8) - at - 8);
    CHECK(count(pl, ",") == 3);
}

TEST_CASE("prop1 pipeline at small scale") {
    const ExperimentConfig cfg = small_prop1();
    const ExperimentReport rep = run_prop1(cfg);
    for (const std::string& f : rep.failures) MESSAGE(f);
    CHECK(rep.pass());
    for (const char* f : {"leja.csv", "sigma.csv", "recurrence.csv", "zeros.csv", "residuals.csv", "cascade.csv",
                          "points.svg", "deviations.svg", "residuals.svg"}) {
        CAPTURE(f);
        CHECK(rep.files.count(f) == 1);
    }
    CHECK(rep.files.at("zeros.csv").rfind("n,k,root,paired_leja,deviation,bound\n", 0) == 0);
    CHECK(rep.files.at("recurrence.csv").rfind("n,a,b\n", 0) == 0);
    CHECK(rep.files.at("residuals.csv").rfind("n,z,residual\n", 0) == 0);
    const json& per_n = rep.summary.at("per_n");
    REQUIRE(per_n.size() == 4);
    for (const json& row : per_n) {
        CHECK(row.at("margin").get<double>() >= 2.0);
        CHECK(row.contains("max_zero_deviation"));
    }

    ExperimentConfig blend = small_prop1();
    blend.target = "blend";
    blend.alpha = 0.5;
    blend.plot = false;
    const ExperimentReport rb = run_prop1(blend);
    for (const std::string& f : rb.failures) MESSAGE(f);
    CHECK(rb.pass());
}

TEST_CASE("determinism") {
    ExperimentConfig cfg = small_prop1();
    const ExperimentReport a = run_prop1(cfg);
    const ExperimentReport b = run_prop1(cfg);
    const fs::path da = scratch_dir("det_a");
    const fs::path db = scratch_dir("det_b");
    write_report(a, da);
    write_report(b, db);
    size_t files = 0;
    for (const auto& entry : fs::directory_iterator(da)) {
        CAPTURE(entry.path().filename().string());
        CHECK(slurp(entry.path()) == slurp(db / entry.path().filename()));
        ++files;
    }
    CHECK(files == a.files.size() + 1);

    ExperimentConfig circle = ExperimentConfig::defaults(ExperimentKind::stahl_circle);
    circle.n_list = {8};
    circle.plot = true;
    const ExperimentReport c1 = run_stahl_circle(circle);
    const ExperimentReport c2 = run_stahl_circle(circle);
    CHECK(dump_json(c1.summary) == dump_json(c2.summary));
    CHECK(c1.files == c2.files);
}

TEST_CASE("leja and capacity experiments") {
    ExperimentConfig leja = ExperimentConfig::defaults(ExperimentKind::leja_only);
    leja.n_list = {20, 40};
    leja.leja_grid = 1024;
    leja.plot = true;
    const ExperimentReport rl = run_leja(leja);
    CHECK(rl.pass());
    CHECK(rl.files.count("leja.csv") == 1);
    CHECK(count(rl.files.at("leja.svg"), "<circle") == 40);

    ExperimentConfig cap = ExperimentConfig::defaults(ExperimentKind::capacity_only);
    cap.region = {{"kind", "lune"}, {"n", 20}, {"eps", 0.1}};
    const ExperimentReport rc = run_capacity(cap);
    CHECK(rc.pass());
}

#ifdef POTLAB_CLI
TEST_CASE("command line") {
    const fs::path dir = scratch_dir("cli");
    fs::create_directories(dir);
    const std::string cli = POTLAB_CLI;
    auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("capacity --out " + (dir / "cap").string() + " --region '{\"kind\":\"disk\",\"r\":1}'") == 0);
    CHECK(fs::exists(dir / "cap" / "summary.json"));
    const json summary = json::parse(slurp(dir / "cap" / "summary.json"));
    CHECK(summary.at("pass") == true);

    std::ofstream(dir / "bad.json") << R"({"experiment":"stahl_circle","epsilon":0.1})";
    CHECK(run("stahl-circle --config " + (dir / "bad.json").string()) == 2);
    CHECK(run("prop1 --n-list 2,11 --out " + (dir / "p").string()) == 2);
    CHECK(run("stahl-circle --n-list 16,32 --plot --out " + (dir / "circle").string()) == 0);
    CHECK(fs::exists(dir / "circle" / "bad_set.svg"));
}
#endif

// potlab command line: runs one experiment and writes its outputs.
//
//   potlab prop1 --out out/prop1 --plot
//   potlab stahl-circle --config circle.json
//   potlab capacity --region '{"kind":"lune","n":20,"eps":0.1}'

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "potlab/errors.hpp"
#include "potlab/experiments.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<unsigned> bits;
    bool plot = false;
    std::optional<double> q;
    std::optional<double> eps;
    std::optional<double> rho;
    std::vector<int> n_list;
    std::optional<size_t> n_max;
    std::optional<std::string> target;
    std::optional<double> alpha;
    std::optional<std::string> schedule;
    std::optional<std::string> domain;
    bool weighted = false;
    std::optional<size_t> grid;
    std::optional<size_t> fekete_points;
    std::optional<uint64_t> seed;
    std::optional<std::string> region;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--bits", o.bits, "binary precision");
    cmd->add_flag("--plot", o.plot, "also write SVG plots");
    cmd->add_option("--n-list", o.n_list, "degrees / sizes to report")->delimiter(',');
    cmd->add_option("--seed", o.seed, "seed for random z samples");
}

potlab::ExperimentConfig build_config(potlab::ExperimentKind kind, const Overrides& o) {
    potlab::ExperimentConfig cfg = potlab::ExperimentConfig::defaults(kind);
    cfg.out_dir = "out/" + potlab::experiment_name(kind);
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw potlab::ConfigError("cannot read config " + o.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw potlab::ConfigError(std::string("config: ") + e.what());
        }
        potlab::apply_config(cfg, j);
    }
    if (o.out) cfg.out_dir = *o.out;
    if (o.bits) cfg.bits = *o.bits;
    if (o.plot) cfg.plot = true;
    if (o.q) cfg.q = *o.q;
    if (o.eps) cfg.eps = *o.eps;
    if (o.rho) cfg.rho = *o.rho;
    if (!o.n_list.empty()) cfg.n_list = o.n_list;
    if (o.n_max) cfg.n_max = *o.n_max;
    if (o.target) cfg.target = *o.target;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.schedule) cfg.schedule = *o.schedule;
    if (o.domain) cfg.domain = *o.domain;
    if (o.weighted) cfg.weighted = true;
    if (o.grid) cfg.leja_grid = *o.grid;
    if (o.fekete_points) cfg.fekete_points = *o.fekete_points;
    if (o.seed) cfg.seed = *o.seed;
    if (o.region) {
        try {
            cfg.region = nlohmann::json::parse(*o.region);
        } catch (const nlohmann::json::exception& e) {
            throw potlab::ConfigError(std::string("--region: ") + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Potential-theory experiments: Leja points, orthogonal polynomials, capacities"};
    app.require_subcommand(1);
    Overrides o;

    auto* prop1 = app.add_subcommand("prop1", "orthogonal polynomials whose zeros track weighted Leja points");
    add_common(prop1, o);
    prop1->add_option("--q", o.q, "weight ratio in (0, 1/2)");
    prop1->add_option("--n-max", o.n_max, "number of atoms of sigma");
    prop1->add_option("--target", o.target, "arcsine, uniform or blend");
    prop1->add_option("--alpha", o.alpha, "blend parameter");
    prop1->add_option("--schedule", o.schedule, "adaptive or geometric");
    prop1->add_option("--grid", o.grid, "Leja candidate grid size");

    auto* circle = app.add_subcommand("stahl-circle", "potentials of roots-of-unity measures near the circle");
    add_common(circle, o);
    circle->add_option("--eps", o.eps, "potential deviation threshold");
    circle->add_option("--rho", o.rho, "outer radius of the sampled region");
    circle->add_option("--fekete-points", o.fekete_points, "minimum Fekete points");

    auto* segment = app.add_subcommand("stahl-segment", "potentials of Chebyshev-zero measures near [-1,1]");
    add_common(segment, o);
    segment->add_option("--eps", o.eps, "potential deviation threshold");
    segment->add_option("--rho", o.rho, "ellipse parameter");
    segment->add_option("--fekete-points", o.fekete_points, "minimum Fekete points");

    auto* leja = app.add_subcommand("leja", "Leja sequences on the segment or the circle");
    add_common(leja, o);
    leja->add_option("--domain", o.domain, "segment or circle");
    leja->add_flag("--weighted", o.weighted, "weight by the target potential");
    leja->add_option("--target", o.target, "arcsine, uniform or blend");
    leja->add_option("--alpha", o.alpha, "blend parameter");
    leja->add_option("--grid", o.grid, "candidate grid size");

    auto* capacity = app.add_subcommand("capacity", "greedy Fekete capacity of a region");
    add_common(capacity, o);
    capacity->add_option("--region", o.region, "region as JSON, e.g. {\"kind\":\"disk\",\"r\":1}");

    CLI11_PARSE(app, argc, argv);

    potlab::ExperimentKind kind = potlab::ExperimentKind::prop1;
    if (*circle) kind = potlab::ExperimentKind::stahl_circle;
    if (*segment) kind = potlab::ExperimentKind::stahl_segment;
    if (*leja) kind = potlab::ExperimentKind::leja_only;
    if (*capacity) kind = potlab::ExperimentKind::capacity_only;

    try {
        const potlab::ExperimentConfig cfg = build_config(kind, o);
        const potlab::ExperimentReport report = potlab::run_experiment(cfg);
        potlab::write_report(report, cfg.out_dir);
        for (const std::string& f : report.failures) std::cerr << "FAIL: " << f << '\n';
        std::cout << potlab::experiment_name(kind) << ": " << (report.pass() ? "pass" : "FAIL") << " ("
                  << cfg.out_dir << ")\n";
        return report.pass() ? 0 : 1;
    } catch (const potlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

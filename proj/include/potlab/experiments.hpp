#pragma once

// Experiment drivers: configuration, the orthogonal-polynomial pipeline, the
// two non-convergence-in-capacity demonstrations, and result serialization.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "potlab/special.hpp"

namespace potlab {

enum class ExperimentKind { prop1, stahl_circle, stahl_segment, leja_only, capacity_only };

std::string experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::prop1;
    double q = 0.4;
    std::vector<int> n_list;
    double eps = 0.1;
    double rho = 1.5;
    unsigned bits = 2048;
    size_t leja_grid = 4096;
    size_t polar_angular = 512;
    size_t polar_radial = 256;
    size_t fekete_points = 64;
    size_t n_max = 10;
    std::string target = "arcsine";
    double alpha = 0.5;
    std::string schedule = "adaptive";  // or "geometric"
    std::string domain = "segment";     // leja: segment or circle
    bool weighted = false;              // leja: weight by the target potential
    std::vector<cdouble> z_samples{cdouble(2.0, 0.0)};
    size_t random_samples = 0;  // extra z drawn from 1.5 <= |z| <= 3 with `seed`
    uint64_t seed = 1;
    nlohmann::json region;  // capacity
    std::string out_dir = "out";
    bool plot = false;

    /// Defaults for the given experiment (n_list, bits).
    static ExperimentConfig defaults(ExperimentKind kind);
    /// Throws ConfigError on violated invariants.
    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Overlays a JSON object onto cfg; unknown keys raise ConfigError.
void apply_config(ExperimentConfig& cfg, const nlohmann::json& j);

/// z sample list including the seeded random samples.
std::vector<cdouble> sample_points(const ExperimentConfig& cfg);

struct ExperimentReport {
    nlohmann::json summary;  // {experiment, config, per_n, pass, ...}
    std::map<std::string, std::string> files;  // CSV and SVG outputs by file name
    std::vector<std::string> failures;
    [[nodiscard]] bool pass() const { return failures.empty(); }
};

struct BadSetSample {
    int n = 0;
    std::vector<cdouble> points;  // grid points of E_n (inequality re-evaluated on store)
    size_t grid_size = 0;
    size_t tilde_samples = 0;
    size_t inclusion_certificate = 0;  // sampled points of the preimage set found in E_n and K_rho
};

/// V^{mu_n}(z) - V^lambda(z) for the roots-of-unity measure; both potentials summed directly.
double circle_potential_gap(int n, cdouble z);
/// The same quantity from -(1/n) log|1 - z^{-n}|.
double circle_potential_gap_closed(int n, cdouble z);
/// V^{mu_n}(z) - V^lambda(z) for the Chebyshev-zero measure.
double segment_potential_gap(int n, cdouble z);

/// Points z with z^n in the lune {|w| >= 1, |w - 1| <= e^{-n eps}}, all n branches.
std::vector<cdouble> circle_tilde_samples(int n, double eps, size_t per_branch = 24);
/// Points of {|T_n| <= 2^{-n} e^{-n eps}}: traced boundary and interior ray fractions.
std::vector<cdouble> segment_tilde_samples(int n, double eps, size_t rays = 64);

BadSetSample sample_circle_bad_set(const ExperimentConfig& cfg, int n);
BadSetSample sample_segment_bad_set(const ExperimentConfig& cfg, int n);

ExperimentReport run_prop1(const ExperimentConfig& cfg);
ExperimentReport run_stahl_circle(const ExperimentConfig& cfg);
ExperimentReport run_stahl_segment(const ExperimentConfig& cfg);
ExperimentReport run_leja(const ExperimentConfig& cfg);
ExperimentReport run_capacity(const ExperimentConfig& cfg);
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Writes summary.json and every file of the report into dir.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// Canonical JSON text (2-space indent, trailing newline).
std::string dump_json(const nlohmann::json& j);

}  // namespace potlab

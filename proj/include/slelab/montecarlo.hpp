#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "slelab/core.hpp"
#include "slelab/stats.hpp"

namespace slelab {

enum class ExperimentKind {
    Cardy,
    ThreeWay,
    AreaPartition,
    LeftSide,
    HalfStripK8,
    KappaRho,
    RadialK2,
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Cardy;
    double kappa = 6.0;
    double rho = std::numeric_limits<double>::quiet_NaN();
    double dt = 1e-3;
    double horizon_T = 6.0;  // LeftSide horizon; RadialK2 stopping time T0
    std::int64_t n_replicas = 1000;
    std::uint64_t seed = 1;
    int shards = 1;
    std::vector<Complex> test_points;  // empty = experiment defaults
    int grid_resolution = 64;          // AreaPartition only
};

/// One reported statistic: estimate vs analytic target with its gate inputs.
struct ResultRow {
    std::string label;
    Complex point{0.0, 0.0};
    double estimate = 0.0;
    double half_width = 0.0;
    double target = std::numeric_limits<double>::quiet_NaN();
    double z_score = std::numeric_limits<double>::quiet_NaN();
    double gof_stat = std::numeric_limits<double>::quiet_NaN();
    double gof_p = std::numeric_limits<double>::quiet_NaN();
    std::int64_t n = 0;
    double undecided_fraction = 0.0;
    bool gate_pass = true;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<double> samples;  // raw per-replica samples when meaningful
    bool pass = true;

    const ResultRow& row(const std::string& label) const;
};

/// Goodness-of-fit harness (spec operation): KS against a CDF or chi-squared
/// against target proportions.  Requires n >= 20.
GoFResult gof_test(const std::vector<double>& samples,
                   const std::function<double(double)>& target_cdf);
GoFResult gof_test(const std::vector<std::int64_t>& counts,
                   const std::vector<double>& target_proportions);

ExperimentResult run_cardy(const ExperimentConfig& cfg);
ExperimentResult run_three_way(const ExperimentConfig& cfg);
ExperimentResult run_area_partition(const ExperimentConfig& cfg);
ExperimentResult run_left_side(const ExperimentConfig& cfg);
ExperimentResult run_halfstrip(const ExperimentConfig& cfg);
ExperimentResult run_kappa_rho(const ExperimentConfig& cfg);
ExperimentResult run_radial_check(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Deterministic replica scheduler: results must be written to per-replica
/// slots, so the aggregate is independent of thread interleaving.
void parallel_replicas(std::int64_t n, int shards,
                       const std::function<void(std::int64_t)>& body);

}  // namespace slelab

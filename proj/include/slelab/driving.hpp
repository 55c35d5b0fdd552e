#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slelab/core.hpp"
#include "slelab/rng.hpp"

namespace slelab {

/// Sampled driving function W at times t_k = k*dt, with optional O and Z
/// tracks when the path was produced by the (kappa,rho) generator.
/// Invariants: values[0] == 0, and when rho is set,
/// o_values[k] - values[k] == z_values[k] exactly with z_values[k] >= 0.
struct DrivingPath {
    double kappa = 0.0;
    double dt = 0.0;
    std::vector<double> values;
    std::optional<double> rho;
    std::vector<double> o_values;
    std::vector<double> z_values;

    std::int64_t steps() const { return static_cast<std::int64_t>(values.size()) - 1; }

    // Piecewise-constant driving on step k (1-based): midpoint of the two
    // endpoint samples.
    double midpoint(std::int64_t k) const {
        return 0.5 * (values[static_cast<std::size_t>(k - 1)] +
                      values[static_cast<std::size_t>(k)]);
    }
};

/// Circle-valued driving xi(t_k) = exp(i W_{t_k}).
struct RadialDriving {
    double kappa = 0.0;
    double dt = 0.0;
    std::vector<Complex> xi;

    std::int64_t steps() const { return static_cast<std::int64_t>(xi.size()) - 1; }
};

/// Scaled Brownian driving: i.i.d. N(0, kappa*dt) increments, W_0 = 0.
DrivingPath brownian_driving(double kappa, double T, double dt, std::uint64_t seed);
DrivingPath brownian_driving(double kappa, double T, double dt, Rng& rng);

/// SLE(kappa,rho) driving.  Z/sqrt(kappa) is a Bessel process of dimension
/// d = 1 + 2(rho+2)/kappa, advanced by exact squared-Bessel transitions
/// (noncentral chi-squared); O integrates 2/Z with trapezoid refinement near
/// Z ~ 0; W = O - Z.  z0 >= 0 is the initial gap; z0 == 0 encodes the (0,0+)
/// start and is replaced by 1e-8 before the first exact transition.
DrivingPath kappa_rho_driving(double kappa, double rho, double T, double dt,
                              std::uint64_t seed, double z0);
DrivingPath kappa_rho_driving(double kappa, double rho, double T, double dt,
                              Rng& rng, double z0);

RadialDriving radial_driving(double kappa, double T, double dt, std::uint64_t seed);

double besq_dimension(double kappa, double rho);

/// CSV audit format: columns t,W[,O,Z], preceded by "# key=value" headers.
void dump_driving_csv(const DrivingPath& path, std::ostream& out);
DrivingPath load_driving_csv(std::istream& in);

}  // namespace slelab

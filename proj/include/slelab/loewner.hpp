#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slelab/core.hpp"
#include "slelab/driving.hpp"
#include "slelab/rng.hpp"

namespace slelab {

enum class PointStatus { Alive, Swallowed };

/// A point of the closed half-plane carried by the discrete Loewner flow.
struct TrackedPointState {
    Complex origin;
    Complex image;
    PointStatus status = PointStatus::Alive;
    std::int64_t swallow_step = -1;  // first step at which a swallow rule fired
};

struct TraceSample {
    std::vector<double> times;
    std::vector<Complex> points;
};

enum class ThreeWayOutcome { ZFirst, Simultaneous, OneFirst, Undecided };
enum class SideOutcome { Left, Right, Undecided };
enum class AbsorbOutcome { Absorbed, NotAbsorbed, Undecided };

struct HorizonExceeded : std::runtime_error {
    explicit HorizonExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Exact one-step solution of dg/dt = 2/(g - w) with constant driving:
/// g -> w + sqrt((g-w)^2 + 4 dt), branch in the closed upper half-plane,
/// real points keeping their side of w.
Complex chordal_step(Complex g, double w_const, double dt);

/// Evolve points under the discrete flow for `horizon_steps` steps of `path`.
/// Swallow detection (see kernels.hpp) is active only for kappa > 4; for
/// kappa <= 4 the Bessel dimension of the gap process is >= 2 and boundary
/// points never vanish, so no rule is allowed to fire.
std::vector<TrackedPointState> evolve_tracked(const DrivingPath& path,
                                              const std::vector<Complex>& points,
                                              std::int64_t horizon_steps);

/// Trace point at step k, via reverse composition of the inverse one-step
/// maps applied to the driving value.  Cost O(k).
Complex compute_trace(const DrivingPath& path, std::int64_t step_index);

/// Full trace sampled every `stride` steps.  Cost O(n^2 / stride).
TraceSample compute_trace_samples(const DrivingPath& path, std::int64_t stride);

struct RayHit {
    std::int64_t step_index = -1;
    double location = 0.0;
};

/// First hit of [1,inf): detects the swallow of boundary point 1 and returns
/// the trace position at that step.  Throws HorizonExceeded if the path ends
/// first (the caller extends the path and retries).
RayHit hit_of_ray(const DrivingPath& path);

/// Order of the swallow times of z and of boundary point 1 under one path;
/// same-step ties are SIMULTANEOUS.  Requires kappa > 4.
ThreeWayOutcome classify_three_way(const DrivingPath& path, Complex z);

/// kappa <= 4 left/right classification at the horizon, with a dead band:
/// LEFT iff arg(g_T(z) - W_T) > 3pi/4, RIGHT iff < pi/4, else UNDECIDED.
SideOutcome classify_side(const DrivingPath& path, Complex z,
                          std::int64_t horizon_steps);

/// Absorption test for an SLE(kappa,rho) path (kappa > 4): swallowed within
/// the horizon => Absorbed; image locked near the normalized point 1 and to
/// the right => NotAbsorbed; otherwise Undecided.
AbsorbOutcome absorbed_under_kappa_rho(const DrivingPath& path, Complex z,
                                       std::int64_t horizon_steps);

// --- Streaming samplers -----------------------------------------------------
//
// The swallow time of a boundary point under kappa > 4 has a polynomial tail
// (the gap is a Bessel process of dimension < 2), so waiting for the swallow
// on one ever-extended path is not affordable.  The samplers below evolve in
// stages: when the tracked gap exceeds `escape_radius` they rescale the state
// to unit size and continue with fresh driving.  By the scaling and Markov
// properties of the driving this leaves the sampled law unchanged, while each
// stage now has an exponentially light duration tail.

struct ChordalSamplerOptions {
    double escape_radius = 12.0;
    int max_stages = 256;
    std::int64_t max_steps_per_stage = 200'000'000;
};

/// Sample the location of the first hit of [1,inf) for SLE(kappa), kappa > 4.
double sample_ray_hit(double kappa, double dt, Rng& rng,
                      const ChordalSamplerOptions& opt = {});

ThreeWayOutcome sample_three_way(double kappa, Complex z, double dt, Rng& rng,
                                 const ChordalSamplerOptions& opt = {});

/// Classify a whole batch of points against the same driving, restart-aware.
std::vector<ThreeWayOutcome> sample_three_way_batch(
    double kappa, const std::vector<Complex>& zs, double dt, Rng& rng,
    const ChordalSamplerOptions& opt = {});

struct KappaRhoOptions {
    double escape_radius = 12.0;
    double decide_eps = 1e-3;  // |zeta/Z - 1| threshold for NotAbsorbed
    int max_stages = 200;
    std::int64_t max_steps_per_stage = 200'000'000;
};

AbsorbOutcome sample_kappa_rho_absorption(double kappa, double rho, Complex z,
                                          double dt, Rng& rng,
                                          const KappaRhoOptions& opt = {});

// --- Radial flow -------------------------------------------------------------

struct RadialOptions {
    double eps_swallow = 1e-4;  // |g - xi| swallow threshold
    int max_halvings = 16;
};

/// Radial flow dg/dt = -g (g+xi)/(g-xi), xi frozen per step at the circular
/// midpoint; classical 4th-order steps with adaptive halving near |g - xi|
/// small.  |g| is nondecreasing along the flow.
TrackedPointState evolve_radial(const RadialDriving& drv, Complex z,
                                std::int64_t horizon_steps,
                                const RadialOptions& opt = {});

/// One radial step with frozen xi; returns true when |g - xi| crosses the
/// swallow threshold.
bool radial_step(Complex& g, Complex xi_mid, double dt,
                 const RadialOptions& opt = {});

// --- Normalized autonomous flow ----------------------------------------------

struct FlowThresholds {
    double eps_zero = 1e-4;
    double r_infinity = 1e4;
    double eps_one = 1e-3;
};

/// Direct simulation of the autonomous SDE satisfied by the normalized flow
///   dw = (w-1)[kappa - (2/w)(1+w)] du + (w-1) dW,   Var dW = kappa du,
/// classifying by first exit: |w| < eps_zero -> ZFirst, |w| > r_infinity ->
/// OneFirst, |w-1| < eps_one -> Simultaneous.  Step sizes shrink
/// diffusively near w = 0 so the eps_zero exit stays resolved.
ThreeWayOutcome normalized_flow_classify(double kappa, Complex w0, double dt,
                                         std::uint64_t seed, std::int64_t horizon,
                                         const FlowThresholds& th = {});

}  // namespace slelab

#include "slelab/loewner.hpp"

#include <algorithm>
#include <cmath>

#include "slelab/kernels.hpp"

namespace slelab {

namespace {

// Inverse of the one-step slit map: zeta -> w + sqrt((zeta-w)^2 - 4 dt),
// branch with Im >= 0, real points keeping their side of w.
Complex pullback_step(Complex zeta, double w, double dt) {
    const Complex delta = zeta - Complex(w, 0.0);
    const Complex s = delta * delta - 4.0 * dt;
    Complex r = sqrt_upper(s);
    if (delta.imag() == 0.0 && r.imag() == 0.0 && delta.real() < 0.0) r = -r;
    return Complex(w, 0.0) + r;
}

struct RealTracked {
    double g = 1.0;
    double prev_sign = 1.0;
    bool swallowed = false;

    // Returns true if a swallow rule fires at this step; otherwise advances.
    bool step(double w, double dt) {
        const double delta = g - w;
        const double sign = delta < 0.0 ? -1.0 : 1.0;
        if (delta * delta <= 4.0 * dt || sign != prev_sign) {
            swallowed = true;
            return true;
        }
        g = w + sign * std::sqrt(delta * delta + 4.0 * dt);
        prev_sign = sign;
        return false;
    }
};

// On-demand Brownian driving; records midpoints for trace pullbacks.
struct StreamingDriving {
    double sd;
    Rng* rng;
    double w_sample = 0.0;
    std::vector<double> mids;

    StreamingDriving(double kappa, double dt, Rng& r)
        : sd(std::sqrt(kappa * dt)), rng(&r) {}

    double step() {
        const double next = w_sample + sd * rng->normal();
        const double mid = 0.5 * (w_sample + next);
        mids.push_back(mid);
        w_sample = next;
        return mid;
    }
};

Complex pullback_chain(Complex seed, const std::vector<double>& mids, double dt) {
    Complex zeta = seed;
    for (std::size_t j = mids.size(); j-- > 0;)
        zeta = pullback_step(zeta, mids[j], dt);
    return zeta;
}

void require_interior(const std::vector<Complex>& points) {
    for (const Complex& z : points)
        if (z.imag() < 0.0)
            throw DomainError("tracked points must satisfy im >= 0");
}

}  // namespace

Complex chordal_step(Complex g, double w_const, double dt) {
    if (!(dt > 0.0)) throw DomainError("chordal_step: dt must be > 0");
    if (g.imag() < 0.0) throw DomainError("chordal_step: need im >= 0");
    const Complex delta = g - Complex(w_const, 0.0);
    const Complex s = delta * delta + 4.0 * dt;
    const Complex r = sqrt_upper(s);
    const double rm = std::fabs(r.real());
    const double re = delta.real() < 0.0 ? -rm : rm;
    return Complex(w_const + re, r.imag());
}

std::vector<TrackedPointState> evolve_tracked(const DrivingPath& path,
                                              const std::vector<Complex>& points,
                                              std::int64_t horizon_steps) {
    require_interior(points);
    if (horizon_steps < 0 || horizon_steps > path.steps())
        throw DomainError("evolve_tracked: horizon exceeds path length");
    const int n = static_cast<int>(points.size());
    std::vector<double> re(points.size()), im(points.size()), prev(points.size(), 0.0);
    std::vector<std::int32_t> sw(points.size(), -1);
    for (int i = 0; i < n; ++i) {
        re[static_cast<std::size_t>(i)] = points[static_cast<std::size_t>(i)].real();
        im[static_cast<std::size_t>(i)] = points[static_cast<std::size_t>(i)].imag();
    }
    const bool detect = path.kappa > 4.0;
    const auto step = kern::chordal_step_batch();
    for (std::int64_t k = 1; k <= horizon_steps; ++k)
        step(re.data(), im.data(), prev.data(), sw.data(), n, path.midpoint(k),
             path.dt, kern::kEpsSwallow, static_cast<std::int32_t>(k), detect);

    std::vector<TrackedPointState> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i].origin = points[i];
        out[i].image = Complex(re[i], im[i]);
        if (sw[i] >= 0) {
            out[i].status = PointStatus::Swallowed;
            out[i].swallow_step = sw[i];
        }
    }
    return out;
}

Complex compute_trace(const DrivingPath& path, std::int64_t step_index) {
    if (step_index < 0 || step_index > path.steps())
        throw DomainError("compute_trace: step index out of range");
    Complex zeta(path.values[static_cast<std::size_t>(step_index)], 0.0);
    for (std::int64_t j = step_index; j >= 1; --j)
        zeta = pullback_step(zeta, path.midpoint(j), path.dt);
    return zeta;
}

TraceSample compute_trace_samples(const DrivingPath& path, std::int64_t stride) {
    if (stride < 1) throw DomainError("compute_trace_samples: stride must be >= 1");
    TraceSample ts;
    for (std::int64_t k = 0; k <= path.steps(); k += stride) {
        ts.times.push_back(static_cast<double>(k) * path.dt);
        ts.points.push_back(compute_trace(path, k));
    }
    return ts;
}

RayHit hit_of_ray(const DrivingPath& path) {
    RealTracked ray;
    for (std::int64_t k = 1; k <= path.steps(); ++k) {
        if (ray.step(path.midpoint(k), path.dt)) {
            const Complex gamma = compute_trace(path, k);
            return {k, gamma.real()};
        }
    }
    throw HorizonExceeded("hit_of_ray: point 1 not swallowed within the path");
}

ThreeWayOutcome classify_three_way(const DrivingPath& path, Complex z) {
    if (!(path.kappa > 4.0))
        throw DomainError("classify_three_way: requires kappa > 4");
    if (!(z.imag() > 0.0)) throw DomainError("classify_three_way: z must be interior");
    RealTracked ray;
    double re = z.real(), im = z.imag(), prev = 0.0;
    std::int32_t sw = -1;
    const auto step = kern::chordal_step_batch();
    for (std::int64_t k = 1; k <= path.steps(); ++k) {
        const double w = path.midpoint(k);
        step(&re, &im, &prev, &sw, 1, w, path.dt, kern::kEpsSwallow,
             static_cast<std::int32_t>(k), true);
        const bool ray_now = ray.step(w, path.dt);
        const bool z_now = sw == static_cast<std::int32_t>(k);
        if (z_now && ray_now) return ThreeWayOutcome::Simultaneous;
        if (z_now) return ThreeWayOutcome::ZFirst;
        if (ray_now) return ThreeWayOutcome::OneFirst;
    }
    throw HorizonExceeded("classify_three_way: undecided within the path");
}

SideOutcome classify_side(const DrivingPath& path, Complex z,
                          std::int64_t horizon_steps) {
    if (!(path.kappa <= 4.0)) throw DomainError("classify_side: requires kappa <= 4");
    if (!(z.imag() > 0.0)) throw DomainError("classify_side: z must be interior");
    if (horizon_steps < 1 || horizon_steps > path.steps())
        throw DomainError("classify_side: bad horizon");
    double re = z.real(), im = z.imag(), prev = 0.0;
    std::int32_t sw = -1;
    const auto step = kern::chordal_step_batch();
    for (std::int64_t k = 1; k <= horizon_steps; ++k)
        step(&re, &im, &prev, &sw, 1, path.midpoint(k), path.dt,
             kern::kEpsSwallow, static_cast<std::int32_t>(k), false);
    const double w_end = path.values[static_cast<std::size_t>(horizon_steps)];
    const double angle = std::atan2(im, re - w_end);
    if (angle > 0.75 * kPi) return SideOutcome::Left;
    if (angle < 0.25 * kPi) return SideOutcome::Right;
    return SideOutcome::Undecided;
}

AbsorbOutcome absorbed_under_kappa_rho(const DrivingPath& path, Complex z,
                                       std::int64_t horizon_steps) {
    if (!path.rho) throw DomainError("absorbed_under_kappa_rho: path lacks O track");
    if (!(path.kappa > 4.0))
        throw DomainError("absorbed_under_kappa_rho: requires kappa > 4");
    if (horizon_steps < 1 || horizon_steps > path.steps())
        throw DomainError("absorbed_under_kappa_rho: bad horizon");
    double re = z.real(), im = z.imag(), prev = 0.0;
    std::int32_t sw = -1;
    const auto step = kern::chordal_step_batch();
    constexpr double kDecideEps = 1e-3;
    for (std::int64_t k = 1; k <= horizon_steps; ++k) {
        step(&re, &im, &prev, &sw, 1, path.midpoint(k), path.dt,
             kern::kEpsSwallow, static_cast<std::int32_t>(k), true);
        if (sw >= 0) return AbsorbOutcome::Absorbed;
        const std::size_t idx = static_cast<std::size_t>(k);
        const double gap = path.z_values[idx];
        if (gap > 0.0) {
            const Complex zeta(re - path.values[idx], im);
            if (std::abs(zeta / gap - Complex(1.0, 0.0)) <= kDecideEps &&
                zeta.real() > 0.0)
                return AbsorbOutcome::NotAbsorbed;
        }
    }
    return AbsorbOutcome::Undecided;
}

// --- Streaming samplers -------------------------------------------------------

namespace {

double sample_ray_hit_impl(double kappa, double dt, Rng& rng,
                           const ChordalSamplerOptions& opt, int depth) {
    if (depth >= opt.max_stages)
        throw InvariantError("sample_ray_hit: stage recursion too deep");
    StreamingDriving drv(kappa, dt, rng);
    RealTracked ray;
    for (std::int64_t k = 1; k <= opt.max_steps_per_stage; ++k) {
        const double w = drv.step();
        if (ray.step(w, dt)) {
            const Complex gamma = pullback_chain(Complex(drv.w_sample, 0.0), drv.mids, dt);
            return gamma.real();
        }
        const double gap = ray.g - drv.w_sample;
        if (gap >= opt.escape_radius) {
            // The point has drifted far from the driving: by scaling and the
            // Markov property the eventual hit location in image coordinates
            // is W + gap * L with L an independent copy of the unit problem.
            const double sub = sample_ray_hit_impl(kappa, dt, rng, opt, depth + 1);
            const Complex seed(drv.w_sample + gap * sub, 0.0);
            return pullback_chain(seed, drv.mids, dt).real();
        }
    }
    throw InvariantError("sample_ray_hit: stage did not terminate");
}

}  // namespace

double sample_ray_hit(double kappa, double dt, Rng& rng,
                      const ChordalSamplerOptions& opt) {
    if (!(kappa > 4.0)) throw DomainError("sample_ray_hit: requires kappa > 4");
    if (!(dt > 0.0)) throw DomainError("sample_ray_hit: dt must be > 0");
    return sample_ray_hit_impl(kappa, dt, rng, opt, 0);
}

ThreeWayOutcome sample_three_way(double kappa, Complex z, double dt, Rng& rng,
                                 const ChordalSamplerOptions& opt) {
    std::vector<ThreeWayOutcome> out =
        sample_three_way_batch(kappa, {z}, dt, rng, opt);
    return out[0];
}

std::vector<ThreeWayOutcome> sample_three_way_batch(
    double kappa, const std::vector<Complex>& zs, double dt, Rng& rng,
    const ChordalSamplerOptions& opt) {
    if (!(kappa > 4.0)) throw DomainError("sample_three_way: requires kappa > 4");
    require_interior(zs);
    const std::size_t total = zs.size();
    std::vector<ThreeWayOutcome> outcome(total, ThreeWayOutcome::Undecided);

    std::vector<double> re(total), im(total), prev(total, 0.0);
    std::vector<std::int32_t> sw(total, -1);
    std::vector<std::uint32_t> idx(total);
    for (std::size_t i = 0; i < total; ++i) {
        re[i] = zs[i].real();
        im[i] = zs[i].imag();
        idx[i] = static_cast<std::uint32_t>(i);
    }
    const auto step = kern::chordal_step_batch();

    auto compact = [&]() {
        std::size_t dst = 0;
        for (std::size_t i = 0; i < re.size(); ++i) {
            if (sw[i] < 0) {
                re[dst] = re[i];
                im[dst] = im[i];
                prev[dst] = prev[i];
                sw[dst] = sw[i];
                idx[dst] = idx[i];
                ++dst;
            }
        }
        re.resize(dst);
        im.resize(dst);
        prev.resize(dst);
        sw.resize(dst);
        idx.resize(dst);
    };

    for (int stage = 0; stage < opt.max_stages; ++stage) {
        StreamingDriving drv(kappa, dt, rng);
        RealTracked ray;
        for (std::int64_t k = 1; k <= opt.max_steps_per_stage; ++k) {
            const double w = drv.step();
            const int n = static_cast<int>(re.size());
            step(re.data(), im.data(), prev.data(), sw.data(), n, w, dt,
                 kern::kEpsSwallow, static_cast<std::int32_t>(k), true);
            const bool ray_now = ray.step(w, dt);
            if (ray_now) {
                for (std::size_t i = 0; i < re.size(); ++i) {
                    if (sw[i] == static_cast<std::int32_t>(k))
                        outcome[idx[i]] = ThreeWayOutcome::Simultaneous;
                    else if (sw[i] < 0)
                        outcome[idx[i]] = ThreeWayOutcome::OneFirst;
                }
                return outcome;
            }
            bool any_new = false;
            for (std::size_t i = 0; i < re.size(); ++i) {
                if (sw[i] == static_cast<std::int32_t>(k)) {
                    outcome[idx[i]] = ThreeWayOutcome::ZFirst;
                    any_new = true;
                }
            }
            if (any_new) {
                compact();
                if (re.empty()) {
                    // Every point fell before point 1: nothing left to decide.
                    return outcome;
                }
            }
            const double gap = ray.g - drv.w_sample;
            if (gap >= opt.escape_radius) {
                for (std::size_t i = 0; i < re.size(); ++i) {
                    re[i] = (re[i] - drv.w_sample) / gap;
                    im[i] = im[i] / gap;
                    prev[i] = 0.0;
                }
                break;  // next stage, fresh driving at unit scale
            }
        }
    }
    throw InvariantError("sample_three_way: stage budget exhausted");
}

AbsorbOutcome sample_kappa_rho_absorption(double kappa, double rho, Complex z,
                                          double dt, Rng& rng,
                                          const KappaRhoOptions& opt) {
    if (!(kappa > 4.0))
        throw DomainError("sample_kappa_rho_absorption: requires kappa > 4");
    if (!(rho > -2.0))
        throw DomainError("sample_kappa_rho_absorption: requires rho > -2");
    if (z.imag() < 0.0) throw DomainError("tracked point must satisfy im >= 0");
    const double d = besq_dimension(kappa, rho);
    const double z_refine = 10.0 * std::sqrt(dt);
    const auto step = kern::chordal_step_batch();

    double re = z.real(), im = z.imag();
    double z0 = 0.0;  // (0,0+) start on the first stage, unit gap afterwards
    for (int stage = 0; stage < opt.max_stages; ++stage) {
        double x = std::max(z0, 1e-8);
        x = x * x / kappa;
        double z_prev = std::sqrt(kappa * x);
        double o = z_prev;
        double w_prev = 0.0;
        double prev_dx = 0.0;
        std::int32_t sw = -1;
        for (std::int64_t k = 1; k <= opt.max_steps_per_stage; ++k) {
            x = dt * rng.noncentral_chi_squared(d, x / dt);
            const double z_next = std::sqrt(kappa * x);
            if (z_prev < z_refine || z_next < z_refine) {
                const double h = dt / 16.0;
                for (int j = 0; j < 16; ++j) {
                    const double zl = z_prev + (z_next - z_prev) * (j / 16.0);
                    const double zr = z_prev + (z_next - z_prev) * ((j + 1) / 16.0);
                    o += h * (1.0 / std::max(zl, 1e-12) + 1.0 / std::max(zr, 1e-12));
                }
            } else {
                o += dt * (1.0 / z_prev + 1.0 / z_next);
            }
            const double w_next = o - z_next;
            const double w_mid = 0.5 * (w_prev + w_next);
            step(&re, &im, &prev_dx, &sw, 1, w_mid, dt, kern::kEpsSwallow,
                 static_cast<std::int32_t>(k), true);
            if (sw >= 0) return AbsorbOutcome::Absorbed;
            const Complex zeta(re - w_next, im);
            if (z_next > 0.0 && zeta.real() > 0.0 &&
                std::abs(zeta / z_next - Complex(1.0, 0.0)) <= opt.decide_eps)
                return AbsorbOutcome::NotAbsorbed;
            if (z_next >= opt.escape_radius) {
                re = zeta.real() / z_next;
                im = zeta.imag() / z_next;
                z0 = 1.0;
                break;
            }
            z_prev = z_next;
            w_prev = w_next;
        }
    }
    return AbsorbOutcome::Undecided;
}

// --- Radial flow ---------------------------------------------------------------

namespace {

Complex radial_rhs(Complex g, Complex xi) {
    return -g * (g + xi) / (g - xi);
}

// One RK4 substep; halves recursively while |g - xi| is small.
bool radial_substep(Complex& g, Complex xi, double h, double eps, int depth,
                    int max_depth) {
    if (std::abs(g - xi) < eps) return true;  // swallowed
    if (std::abs(g - xi) < 10.0 * eps && depth < max_depth) {
        if (radial_substep(g, xi, 0.5 * h, eps, depth + 1, max_depth)) return true;
        return radial_substep(g, xi, 0.5 * h, eps, depth + 1, max_depth);
    }
    const Complex k1 = radial_rhs(g, xi);
    const Complex k2 = radial_rhs(g + 0.5 * h * k1, xi);
    const Complex k3 = radial_rhs(g + 0.5 * h * k2, xi);
    const Complex k4 = radial_rhs(g + h * k3, xi);
    g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (std::abs(g) > 1.0) g /= std::abs(g);  // rounding guard at the circle
    return false;
}

}  // namespace

bool radial_step(Complex& g, Complex xi_mid, double dt, const RadialOptions& opt) {
    return radial_substep(g, xi_mid, dt, opt.eps_swallow, 0, opt.max_halvings);
}

TrackedPointState evolve_radial(const RadialDriving& drv, Complex z,
                                std::int64_t horizon_steps,
                                const RadialOptions& opt) {
    if (!(std::abs(z) < 1.0)) throw DomainError("evolve_radial: need |z| < 1");
    if (horizon_steps < 0 || horizon_steps > drv.steps())
        throw DomainError("evolve_radial: bad horizon");
    TrackedPointState st;
    st.origin = z;
    Complex g = z;
    for (std::int64_t k = 1; k <= horizon_steps; ++k) {
        const std::size_t idx = static_cast<std::size_t>(k);
        const Complex ratio = drv.xi[idx] / drv.xi[idx - 1];
        const double half_arg = 0.5 * std::atan2(ratio.imag(), ratio.real());
        const Complex xi_mid =
            drv.xi[idx - 1] * Complex(std::cos(half_arg), std::sin(half_arg));
        if (radial_substep(g, xi_mid, drv.dt, opt.eps_swallow, 0, opt.max_halvings)) {
            st.status = PointStatus::Swallowed;
            st.swallow_step = k;
            st.image = g;
            return st;
        }
        st.image = g;
    }
    st.image = g;
    return st;
}

// --- Normalized autonomous flow --------------------------------------------------

ThreeWayOutcome normalized_flow_classify(double kappa, Complex w0, double dt,
                                         std::uint64_t seed, std::int64_t horizon,
                                         const FlowThresholds& th) {
    if (!(kappa > 4.0)) throw DomainError("normalized_flow_classify: requires kappa > 4");
    if (!(dt > 0.0)) throw DomainError("normalized_flow_classify: dt must be > 0");
    Rng rng(seed);
    Complex w = w0;
    const double u_max = static_cast<double>(horizon) * dt;
    const double min_frac = 0.25 * (th.eps_zero / 0.1) * (th.eps_zero / 0.1);
    double u = 0.0;
    std::int64_t iter = 0;
    const std::int64_t iter_cap = horizon * 1024;
    while (true) {
        const double mag = std::abs(w);
        if (mag <= th.eps_zero) return ThreeWayOutcome::ZFirst;
        if (mag >= th.r_infinity) return ThreeWayOutcome::OneFirst;
        if (std::abs(w - Complex(1.0, 0.0)) <= th.eps_one && mag <= 2.0)
            return ThreeWayOutcome::Simultaneous;
        if (u >= u_max || ++iter > iter_cap) return ThreeWayOutcome::Undecided;
        // Diffusive substepping near w = 0 keeps the eps_zero exit resolved.
        double frac = (mag / 0.1) * (mag / 0.1);
        frac = std::clamp(frac, min_frac, 1.0);
        const double du = dt * frac;
        const Complex drift =
            (w - Complex(1.0, 0.0)) * (kappa - (2.0 / w) * (1.0 + w));
        const double noise = std::sqrt(kappa * du) * rng.normal();
        w += drift * du + (w - Complex(1.0, 0.0)) * noise;
        u += du;
    }
}

}  // namespace slelab

#include "slelab/maps.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>

#include "slelab/special.hpp"

namespace slelab {

namespace {

// Principal-branch integrand u^(alpha-1) (1-u)^(beta-1); analytic on the
// closed upper half-plane minus {0,1} and matching the real-axis limits
// taken from above.
Complex sc_integrand(Complex u, double am1, double bm1) {
    return std::pow(u, am1) * std::pow(Complex(1.0, 0.0) - u, bm1);
}

struct RulePair {
    QuadRule lo;
    QuadRule hi;
};

const RulePair& legendre_rules() {
    static const RulePair rp{gauss_legendre(24), gauss_legendre(48)};
    return rp;
}

// Cache of Gauss-Jacobi rules keyed by the 0-endpoint exponent.
const RulePair& jacobi_rules(double b_exponent) {
    static std::mutex mu;
    static std::map<double, RulePair> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(b_exponent);
    if (it == cache.end()) {
        it = cache.emplace(b_exponent,
                           RulePair{gauss_jacobi(24, 0.0, b_exponent),
                                    gauss_jacobi(48, 0.0, b_exponent)})
                 .first;
    }
    return it->second;
}

// integral_0^1 s^g f(s) ds with the rule for weight (1+x)^g.
template <typename F>
Complex jacobi_01(const QuadRule& r, double g, F&& f) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double s = 0.5 * (r.nodes[i] + 1.0);
        acc += r.weights[i] * f(s);
    }
    return acc * std::pow(2.0, -(g + 1.0));
}

template <typename F>
Complex legendre_seg(const QuadRule& r, Complex u0, Complex u1, F&& f) {
    const Complex mid = 0.5 * (u0 + u1);
    const Complex half = 0.5 * (u1 - u0);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        acc += r.weights[i] * f(mid + half * r.nodes[i]);
    return acc * half;
}

// Adaptive smooth-segment integration (bisect until rule doubling agrees).
template <typename F>
Complex adaptive_seg(Complex u0, Complex u1, F&& f, double tol, int depth = 0) {
    const auto& rp = legendre_rules();
    const Complex lo = legendre_seg(rp.lo, u0, u1, f);
    const Complex hi = legendre_seg(rp.hi, u0, u1, f);
    if (std::abs(hi - lo) <= tol || depth >= 24) return hi;
    const Complex mid = 0.5 * (u0 + u1);
    return adaptive_seg(u0, mid, f, 0.5 * tol, depth + 1) +
           adaptive_seg(mid, u1, f, 0.5 * tol, depth + 1);
}

}  // namespace

QuadRule gauss_jacobi(int n, double a, double b) {
    if (n < 1 || a <= -1.0 || b <= -1.0) throw DomainError("gauss_jacobi: bad rule");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double apb = a + b;
    for (int k = 0; k < n; ++k) {
        double diag;
        if (k == 0) {
            diag = (b - a) / (apb + 2.0);
        } else {
            const double den = (2.0 * k + apb) * (2.0 * k + apb + 2.0);
            diag = (b * b - a * a) / den;
        }
        J(k, k) = diag;
        if (k >= 1) {
            double beta_k;
            if (k == 1) {
                beta_k = 4.0 * (a + 1.0) * (b + 1.0) /
                         ((apb + 2.0) * (apb + 2.0) * (apb + 3.0));
            } else {
                const double kk = k;
                const double den = (2.0 * kk + apb) * (2.0 * kk + apb) *
                                   (2.0 * kk + apb + 1.0) * (2.0 * kk + apb - 1.0);
                beta_k = 4.0 * kk * (kk + a) * (kk + b) * (kk + apb) / den;
            }
            J(k, k - 1) = J(k - 1, k) = std::sqrt(beta_k);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::pow(2.0, apb + 1.0) * beta_fn(a + 1.0, b + 1.0);
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

QuadRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

namespace {

// Natural-frame F: integral of the principal-branch integrand from 0,
// without any affine normalization.  Three charts cover the closed
// half-plane: around 0, around 1, and beyond the ray (1,inf).
Complex f_nat(const TriangleGeometry& g, Complex z, const QuadRule& j_alpha,
              const QuadRule& j_beta, double* err_scale, bool hi_rule) {
    const double am1 = g.alpha - 1.0;
    const double bm1 = g.beta - 1.0;
    const double tol = hi_rule ? 1e-13 : 1e-11;
    (void)err_scale;

    if (z == Complex(0.0, 0.0)) return 0.0;

    if (std::abs(z - Complex(1.0, 0.0)) <= 0.45) {
        // F(1) - (1-z)^beta * int_0^1 (1 - (1-z)v)^(alpha-1) v^(beta-1) dv
        const Complex omz = Complex(1.0, 0.0) - z;
        const Complex tail = jacobi_01(j_beta, bm1, [&](double v) {
            return std::pow(Complex(1.0, 0.0) - omz * v, am1);
        });
        return Complex(g.full_beta, 0.0) - std::pow(omz, g.beta) * tail;
    }

    if (z.real() > 1.0) {
        // Closed form along [1, Re z] from above, then a vertical leg.
        const double xr = z.real();
        const Complex phase = std::exp(Complex(0.0, -kPi * bm1));
        const Complex on_ray =
            Complex(g.full_beta, 0.0) +
            phase * g.full_beta *
                (1.0 - reg_incomplete_beta(g.alpha, g.beta, 1.0 / xr));
        if (z.imag() == 0.0) return on_ray;
        const Complex leg = adaptive_seg(
            Complex(xr, 0.0), z,
            [&](Complex u) { return sc_integrand(u, am1, bm1); }, tol);
        return on_ray + leg;
    }

    // Origin chart: Gauss-Jacobi on [0, z/2], smooth quadrature on [z/2, z].
    const Complex zh = 0.5 * z;
    const Complex head = std::pow(zh, g.alpha) * jacobi_01(j_alpha, am1, [&](double s) {
        return std::pow(Complex(1.0, 0.0) - zh * s, bm1);
    });
    const Complex rest = adaptive_seg(
        zh, z, [&](Complex u) { return sc_integrand(u, am1, bm1); }, tol);
    return head + rest;
}

Complex f_nat_prime(const TriangleGeometry& g, Complex z) {
    return sc_integrand(z, g.alpha - 1.0, g.beta - 1.0);
}

const QuadRule& rule_alpha(const TriangleGeometry& g, bool hi) {
    const RulePair& rp = jacobi_rules(g.alpha - 1.0);
    return hi ? rp.hi : rp.lo;
}
const QuadRule& rule_beta(const TriangleGeometry& g, bool hi) {
    const RulePair& rp = jacobi_rules(g.beta - 1.0);
    return hi ? rp.hi : rp.lo;
}

Complex f_nat_eval(const TriangleGeometry& g, Complex z, double* est_error) {
    const Complex lo = f_nat(g, z, rule_alpha(g, false), rule_beta(g, false),
                             nullptr, false);
    const Complex hi = f_nat(g, z, rule_alpha(g, true), rule_beta(g, true),
                             nullptr, true);
    if (est_error) *est_error = std::abs(hi - lo);
    return hi;
}

Complex spec_frame(const TriangleGeometry& g, Complex w_nat) {
    return std::conj(w_nat / g.c_nat);
}

Complex nat_frame(const TriangleGeometry& g, Complex w_spec) {
    return std::conj(w_spec) * g.c_nat;
}

}  // namespace

TriangleGeometry triangle_geometry(double kappa) {
    if (!(kappa > 4.0 && kappa < 8.0))
        throw DomainError("triangle_geometry: kappa must lie in (4,8)");
    TriangleGeometry g;
    g.kappa = kappa;
    g.alpha = 1.0 - 4.0 / kappa;
    g.beta = 8.0 / kappa - 1.0;
    g.full_beta = beta_fn(g.alpha, g.beta);
    // F_nat(inf) = B(alpha,beta) (1 + e^{-i pi (beta-1)}); both halves of the
    // real axis contribute B(alpha,beta) because 1 - alpha - beta = alpha.
    g.c_nat = g.full_beta * (1.0 + std::exp(Complex(0.0, -kPi * (g.beta - 1.0))));
    g.a = Complex(0.0, 0.0);
    g.c = Complex(1.0, 0.0);
    g.b = Complex(0.5, 0.5 * std::tan(g.alpha * kPi));
    g.area = 0.25 * std::tan(g.alpha * kPi);
    g.probe_z = Complex(0.0, 1.0);
    g.probe_w_nat = f_nat_eval(g, g.probe_z, nullptr);
    return g;
}

MapEvaluation sc_triangle_map_eval(const TriangleGeometry& g, Complex z) {
    if (z.imag() < 0.0) throw DomainError("sc_triangle_map: need im >= 0");
    MapEvaluation ev;
    ev.input = z;
    double err = 0.0;
    const Complex w_nat = f_nat_eval(g, z, &err);
    ev.value = spec_frame(g, w_nat);
    ev.est_error = err / std::abs(g.c_nat);
    return ev;
}

Complex sc_triangle_map(const TriangleGeometry& g, Complex z) {
    return sc_triangle_map_eval(g, z).value;
}

Complex sc_inverse(const TriangleGeometry& g, Complex w) {
    const Complex target_nat = nat_frame(g, w);
    const Complex start_nat = g.probe_w_nat;

    int segments = 4;
    for (int attempt = 0; attempt < 8; ++attempt, segments *= 2) {
        Complex z = g.probe_z;
        bool ok = true;
        for (int s = 1; s <= segments && ok; ++s) {
            const Complex goal =
                start_nat + (target_nat - start_nat) *
                                (static_cast<double>(s) / segments);
            bool converged = false;
            for (int it = 0; it < 60; ++it) {
                const Complex f = f_nat(g, z, rule_alpha(g, true),
                                        rule_beta(g, true), nullptr, true) -
                                  goal;
                if (std::abs(f) < 1e-12 * std::abs(g.c_nat)) {
                    converged = true;
                    break;
                }
                const Complex fp = f_nat_prime(g, z);
                Complex step = f / fp;
                // Keep iterates inside the closed half-plane.
                double damp = 1.0;
                while (damp > 1e-4 && (z - damp * step).imag() < 0.0) damp *= 0.5;
                Complex zn = z - damp * step;
                if (zn.imag() < 0.0) zn = Complex(zn.real(), 0.0);
                if (!(std::abs(zn - z) < 1e3 * (1.0 + std::abs(z)))) break;
                z = zn;
            }
            ok = converged;
        }
        if (ok) {
            const Complex res = spec_frame(g, f_nat_eval(g, z, nullptr)) - w;
            if (std::abs(res) <= 1e-8) return z;
        }
    }
    throw InvariantError("sc_inverse: Newton continuation failed to converge");
}

std::array<double, 3> barycentric(const TriangleGeometry& g, Complex w) {
    // Solve w = la*a + lb*b + lc*c with la+lb+lc = 1.
    const Complex u = g.b - g.a;
    const Complex v = g.c - g.a;
    const Complex p = w - g.a;
    const double det = u.real() * v.imag() - u.imag() * v.real();
    const double lb = (p.real() * v.imag() - p.imag() * v.real()) / det;
    const double lc = (u.real() * p.imag() - u.imag() * p.real()) / det;
    const double la = 1.0 - lb - lc;
    constexpr double kTol = 1e-9;
    if (la < -kTol || lb < -kTol || lc < -kTol)
        throw DomainError("barycentric: point outside the closed triangle");
    std::array<double, 3> out{std::max(la, -1e-12), std::max(lb, -1e-12),
                              std::max(lc, -1e-12)};
    const double sum = out[0] + out[1] + out[2];
    for (double& x : out) x /= sum;
    return out;
}

double cardy_cdf(double kappa, double x) {
    if (!(kappa > 4.0 && kappa < 8.0))
        throw DomainError("cardy_cdf: kappa must lie in (4,8)");
    return reg_incomplete_beta(1.0 - 4.0 / kappa, 8.0 / kappa - 1.0, x);
}

double triangle_edge_position(const TriangleGeometry& g, double x) {
    if (!(x >= 1.0)) throw DomainError("triangle_edge_position: need x >= 1");
    return 1.0 - reg_incomplete_beta(g.alpha, g.beta, 1.0 / x);
}

double triangle_edge_position_quadrature(const TriangleGeometry& g, double x) {
    if (!(x >= 1.0)) throw DomainError("triangle_edge_position: need x >= 1");
    const double am1 = g.alpha - 1.0;
    const double bm1 = g.beta - 1.0;
    const auto& ja = jacobi_rules(am1).hi;
    const auto& jb = jacobi_rules(bm1).hi;
    // Q(t) = int_0^t v^(alpha-1)(1-v)^(beta-1) dv for t <= 1/2.
    auto q_head = [&](double t) {
        if (t == 0.0) return 0.0;
        const Complex val =
            std::pow(Complex(t, 0.0), g.alpha) * jacobi_01(ja, am1, [&](double s) {
                return std::pow(Complex(1.0 - t * s, 0.0), bm1);
            });
        return val.real();
    };
    // R = int_{1/2}^1: substitute v = 1 - s/2.
    const Complex rtail =
        std::pow(Complex(0.5, 0.0), g.beta) * jacobi_01(jb, bm1, [&](double s) {
            return std::pow(Complex(1.0 - 0.5 * s, 0.0), am1);
        });
    const double half_mass = q_head(0.5);
    const double total = half_mass + rtail.real();
    const double t = 1.0 / x;
    double tail_mass;  // int_t^1
    if (t <= 0.5) {
        tail_mass = (half_mass - q_head(t)) + rtail.real();
    } else {
        // int_t^1 with t > 1/2: v = 1 - (1-t)s.
        const Complex m =
            std::pow(Complex(1.0 - t, 0.0), g.beta) * jacobi_01(jb, bm1, [&](double s) {
                return std::pow(Complex(1.0 - (1.0 - t) * s, 0.0), am1);
            });
        tail_mass = m.real();
    }
    return tail_mass / total;
}

Complex halfstrip_map(Complex z) {
    if (z == Complex(1.0, 0.0))
        throw DomainError("halfstrip_map: z = 1 is the logarithmic corner");
    if (z.imag() < 0.0) throw DomainError("halfstrip_map: need im >= 0");
    const Complex sq = sqrt_upper(z);  // principal on H: image in first quadrant
    const Complex ratio = (sq - 1.0) / (sq + 1.0);
    Complex lg = std::log(ratio);
    // Real-axis points of (0,1) map through negative ratios: take the limit
    // from the upper half-plane, arg = +pi.
    if (ratio.imag() == 0.0 && ratio.real() < 0.0)
        lg = Complex(std::log(-ratio.real()), kPi);
    return Complex(0.0, -1.0 / kPi) * lg;
}

Complex halfstrip_inverse(Complex w) {
    const Complex e = std::exp(Complex(0.0, kPi) * w);
    const Complex sq = (1.0 + e) / (1.0 - e);
    return sq * sq;
}

MapEvaluation halfstrip_map_quadrature(Complex z) {
    if (z.imag() <= 0.0) throw DomainError("halfstrip_map_quadrature: interior only");
    const auto& rp = jacobi_rules(-0.5);
    auto eval = [&](const QuadRule& rule, double tol) {
        const Complex zh = 0.5 * z;
        const Complex head =
            std::pow(zh, 0.5) * jacobi_01(rule, -0.5, [&](double s) {
                return 1.0 / (zh * s - 1.0);
            });
        const Complex rest = adaptive_seg(
            zh, z,
            [&](Complex u) { return 1.0 / (std::pow(u, 0.5) * (u - 1.0)); },
            tol);
        return Complex(1.0, 0.0) +
               Complex(0.0, -1.0 / kPi) * (head + rest);
    };
    MapEvaluation ev;
    ev.input = z;
    const Complex lo = eval(rp.lo, 1e-11);
    const Complex hi = eval(rp.hi, 1e-13);
    ev.value = hi;
    ev.est_error = std::abs(hi - lo);
    return ev;
}

double kappa_rho_boundary_prob(double kappa, Complex z) {
    if (!(kappa > 4.0)) throw DomainError("kappa_rho_boundary_prob: kappa > 4");
    if (!(z.imag() > 0.0)) throw DomainError("kappa_rho_boundary_prob: interior z");
    const double theta = std::atan2(z.imag(), z.real());
    return 1.0 - theta / kPi;
}

double kappa_rho_boundary_prob_integral(double kappa, double theta) {
    if (!(kappa > 4.0)) throw DomainError("kappa_rho_boundary_prob: kappa > 4");
    if (!(theta >= 0.1 && theta <= kPi - 0.1))
        throw DomainError("kappa_rho_boundary_prob_integral: theta in [0.1, pi-0.1]");
    const double a = 4.0 / kappa;
    const double am = -a;           // exponent at 0
    const double bm = a - 1.0;      // exponent at 1
    const auto& ja = jacobi_rules(am).hi;
    const double cot = std::cos(kPi * (1.0 - a)) / std::sin(kPi * (1.0 - a));
    auto phi = [&](Complex u) { return u.real() - cot * u.imag(); };
    auto h_at = [&](double radius) {
        const Complex z = radius * Complex(std::cos(theta), std::sin(theta));
        const Complex zh = 0.5 * z;
        const Complex head =
            std::pow(zh, 1.0 - a) * jacobi_01(ja, am, [&](double s) {
                return std::pow(Complex(1.0, 0.0) - zh * s, bm);
            });
        const Complex rest = adaptive_seg(
            zh, z, [&](Complex u) { return sc_integrand(u, am, bm); }, 1e-13);
        return phi(head + rest);
    };
    const double norm = beta_fn(1.0 - a, a);
    const double r1 = 2.0e4;
    const double p1 = h_at(r1) / norm;
    const double p2 = h_at(2.0 * r1) / norm;
    return 2.0 * p2 - p1;  // leading 1/R error cancels
}

RegionDescription region_description(double kappa) {
    if (!(kappa > 0.0)) throw DomainError("region_description: kappa > 0");
    RegionDescription r;
    if (kappa > 4.0 && kappa < 8.0) {
        const TriangleGeometry g = triangle_geometry(kappa);
        r.tag = RegionCase::TRIANGLE;
        r.vertices = {g.a, g.b, g.c};
        r.angles = {g.alpha * kPi, g.beta * kPi, g.alpha * kPi};
        r.bounded = true;
        r.note = "isosceles triangle, apex angle beta*pi at b";
    } else if (kappa == 4.0) {
        r.tag = RegionCase::SLIT_LOG;
        r.bounded = false;
        r.note = "log image: horizontal strip of height pi, slit picture";
    } else if (kappa == 8.0) {
        r.tag = RegionCase::HALF_STRIP;
        r.vertices = {Complex(1.0, 0.0), Complex(0.0, 0.0)};
        r.angles = {0.5 * kPi, 0.5 * kPi};
        r.bounded = false;
        r.note = "half-strip {0 < Re < 1, Im > 0}";
    } else if (kappa > 8.0) {
        r.tag = RegionCase::UNBOUNDED_K_GT_8;
        const double a1 = (1.0 - 4.0 / kappa) * kPi;
        const double a2 = (4.0 / kappa) * kPi;
        r.vertices = {Complex(0.0, 0.0), Complex(1.0, 0.0)};
        r.angles = {a1, kPi - a2};
        r.bounded = false;
        r.note = "wedge region unbounded in every direction";
    } else if (kappa >= 8.0 / 3.0) {
        r.tag = RegionCase::STRIPLIKE_83_4;
        r.angles = {(4.0 / kappa - 1.0) * kPi, (4.0 / kappa) * kPi};
        r.bounded = false;
        r.note = "strip-like region {Im < 1} between two rays";
    } else {
        r.tag = RegionCase::NON_UNIVALENT;
        r.bounded = false;
        r.note = "the candidate map is not univalent below 8/3";
    }
    return r;
}

std::string region_case_name(RegionCase c) {
    switch (c) {
        case RegionCase::TRIANGLE: return "TRIANGLE";
        case RegionCase::SLIT_LOG: return "SLIT_LOG";
        case RegionCase::HALF_STRIP: return "HALF_STRIP";
        case RegionCase::UNBOUNDED_K_GT_8: return "UNBOUNDED_K_GT_8";
        case RegionCase::STRIPLIKE_83_4: return "STRIPLIKE_83_4";
        case RegionCase::NON_UNIVALENT: return "NON_UNIVALENT";
    }
    return "?";
}

}  // namespace slelab

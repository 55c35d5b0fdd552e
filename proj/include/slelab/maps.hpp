#pragma once

#include <array>
#include <string>
#include <vector>

#include "slelab/core.hpp"

namespace slelab {

struct QuadRule {
    std::vector<double> nodes;    // on [-1,1]
    std::vector<double> weights;
};

/// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on [-1,1] (Golub-Welsch).
QuadRule gauss_jacobi(int n, double a, double b);
QuadRule gauss_legendre(int n);

/// Target triangle for 4 < kappa < 8.  Vertices use the convention a = 0,
/// c = 1 on the real axis and b = 1/2 + (i/2) tan(alpha pi) above it; the map
/// below realizes F(0)=a, F(1)=b, F(infinity)=c with that placement (it is
/// the mirror image of the principal-branch Schwarz-Christoffel integral,
/// which leaves every hitting statistic unchanged).
struct TriangleGeometry {
    double kappa = 0.0;
    double alpha = 0.0;   // 1 - 4/kappa
    double beta = 0.0;    // 8/kappa - 1
    Complex a, b, c;
    Complex c_nat;        // natural-frame image of infinity
    double full_beta = 0.0;  // B(alpha, beta)
    double area = 0.0;
    Complex probe_z;      // cached Newton anchor (i) ...
    Complex probe_w_nat;  // ... and its natural-frame image
};

struct MapEvaluation {
    Complex input;
    Complex value;
    double est_error = 0.0;
};

TriangleGeometry triangle_geometry(double kappa);

/// F(z) for z in the closed half-plane; |est_error| from rule doubling.
MapEvaluation sc_triangle_map_eval(const TriangleGeometry& g, Complex z);
Complex sc_triangle_map(const TriangleGeometry& g, Complex z);

/// Preimage of a point of the closed triangle; Newton with path continuation
/// from a cached anchor.  Guarantees |F(result) - w| <= 1e-8 or throws.
Complex sc_inverse(const TriangleGeometry& g, Complex w);

/// Barycentric coordinates of w with respect to (a, b, c); components are
/// clipped at -1e-12 and renormalized to sum exactly to 1.
std::array<double, 3> barycentric(const TriangleGeometry& g, Complex w);

/// CDF of 1/gamma_{tau_1}: the regularized incomplete beta I_x(alpha, beta).
double cardy_cdf(double kappa, double x);

/// Position of F(x), x >= 1, along the side (b,c), normalized to [0,1] from b.
double triangle_edge_position(const TriangleGeometry& g, double x);
/// Same quantity by pure Gauss quadrature (independent of the beta routines).
double triangle_edge_position_quadrature(const TriangleGeometry& g, double x);

/// kappa = 8 half-strip map, normalized so F(0)=1, F(infinity)=0 and
/// F(H) = {0 < Re < 1, Im > 0}:  F(z) = -(i/pi) Log((sqrt z - 1)/(sqrt z + 1)).
Complex halfstrip_map(Complex z);
Complex halfstrip_inverse(Complex w);
/// Direct quadrature of F' = -(i/pi) z^{-1/2} (z-1)^{-1} (consistency route).
MapEvaluation halfstrip_map_quadrature(Complex z);

/// Probability that z lies to the RIGHT of the right boundary of an
/// SLE(kappa, kappa/2-2) hull from (0,0+): closed form 1 - arg(z)/pi.
double kappa_rho_boundary_prob(double kappa, Complex z);
/// The same number via the linear functional of the Schwarz-Christoffel
/// integral along the ray arg = theta, Richardson-extrapolated in the ray
/// radius.  Valid for theta in [0.1, pi-0.1].
double kappa_rho_boundary_prob_integral(double kappa, double theta);

enum class RegionCase {
    TRIANGLE,
    SLIT_LOG,
    HALF_STRIP,
    UNBOUNDED_K_GT_8,
    STRIPLIKE_83_4,
    NON_UNIVALENT,
};

struct RegionDescription {
    RegionCase tag;
    std::vector<Complex> vertices;
    std::vector<double> angles;  // interior angles where meaningful
    bool bounded = false;
    std::string note;
};

RegionDescription region_description(double kappa);
std::string region_case_name(RegionCase c);

}  // namespace slelab

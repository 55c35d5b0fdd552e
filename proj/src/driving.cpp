#include "slelab/driving.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace slelab {

namespace {

std::int64_t step_count(double T, double dt) {
    if (!(dt > 0.0)) throw DomainError("driving: dt must be > 0");
    if (!(T >= dt)) throw DomainError("driving: need T >= dt");
    return std::llround(T / dt);
}

}  // namespace

double besq_dimension(double kappa, double rho) {
    return 1.0 + 2.0 * (rho + 2.0) / kappa;
}

DrivingPath brownian_driving(double kappa, double T, double dt, Rng& rng) {
    if (!(kappa > 0.0)) throw DomainError("brownian_driving: kappa must be > 0");
    const std::int64_t n = step_count(T, dt);
    DrivingPath path;
    path.kappa = kappa;
    path.dt = dt;
    path.values.resize(static_cast<std::size_t>(n) + 1);
    path.values[0] = 0.0;
    const double sd = std::sqrt(kappa * dt);
    for (std::int64_t k = 1; k <= n; ++k)
        path.values[static_cast<std::size_t>(k)] =
            path.values[static_cast<std::size_t>(k - 1)] + sd * rng.normal();
    return path;
}

DrivingPath brownian_driving(double kappa, double T, double dt, std::uint64_t seed) {
    Rng rng(seed);
    return brownian_driving(kappa, T, dt, rng);
}

DrivingPath kappa_rho_driving(double kappa, double rho, double T, double dt,
                              Rng& rng, double z0) {
    if (!(kappa > 0.0)) throw DomainError("kappa_rho_driving: kappa must be > 0");
    if (!(rho > -2.0)) throw DomainError("kappa_rho_driving: rho must be > -2");
    if (z0 < 0.0) throw DomainError("kappa_rho_driving: z0 must be >= 0");
    const std::int64_t n = step_count(T, dt);
    const double d = besq_dimension(kappa, rho);
    if (z0 == 0.0) z0 = 1e-8;  // singular (0,0+) start

    DrivingPath path;
    path.kappa = kappa;
    path.dt = dt;
    path.rho = rho;
    const std::size_t len = static_cast<std::size_t>(n) + 1;
    path.values.resize(len);
    path.o_values.resize(len);
    path.z_values.resize(len);

    // X = Z^2 / kappa is BESQ(d); X_{t+dt} = dt * chi2'(d, X_t/dt).
    double x = z0 * z0 / kappa;
    double z_prev = std::sqrt(kappa * x);
    double o = z_prev;  // O_0 = z0, W_0 = 0
    path.o_values[0] = o;
    path.values[0] = 0.0;
    path.z_values[0] = o;

    const double z_refine = 10.0 * std::sqrt(dt);
    for (std::int64_t k = 1; k <= n; ++k) {
        x = dt * rng.noncentral_chi_squared(d, x / dt);
        const double z_next = std::sqrt(kappa * x);
        // O_t = 2 int du/Z_u; refine the trapezoid 16x when Z is small,
        // since 1/Z blows up exactly where the driving moves fastest.
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
        const std::size_t idx = static_cast<std::size_t>(k);
        path.o_values[idx] = o;
        path.values[idx] = o - z_next;
        // Store the rounded difference so o - w == z holds exactly.
        path.z_values[idx] = path.o_values[idx] - path.values[idx];
        z_prev = z_next;
    }
    return path;
}

DrivingPath kappa_rho_driving(double kappa, double rho, double T, double dt,
                              std::uint64_t seed, double z0) {
    Rng rng(seed);
    return kappa_rho_driving(kappa, rho, T, dt, rng, z0);
}

RadialDriving radial_driving(double kappa, double T, double dt, std::uint64_t seed) {
    Rng rng(seed);
    if (!(kappa > 0.0)) throw DomainError("radial_driving: kappa must be > 0");
    const std::int64_t n = step_count(T, dt);
    RadialDriving drv;
    drv.kappa = kappa;
    drv.dt = dt;
    drv.xi.resize(static_cast<std::size_t>(n) + 1);
    double w = 0.0;
    drv.xi[0] = Complex(1.0, 0.0);
    const double sd = std::sqrt(kappa * dt);
    for (std::int64_t k = 1; k <= n; ++k) {
        w += sd * rng.normal();
        drv.xi[static_cast<std::size_t>(k)] = Complex(std::cos(w), std::sin(w));
    }
    return drv;
}

void dump_driving_csv(const DrivingPath& path, std::ostream& out) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# kappa=%.17g\n# dt=%.17g\n", path.kappa, path.dt);
    out << buf;
    if (path.rho) {
        std::snprintf(buf, sizeof buf, "# rho=%.17g\n", *path.rho);
        out << buf;
        out << "t,W,O,Z\n";
    } else {
        out << "t,W\n";
    }
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        if (path.rho) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                          k * path.dt, path.values[k], path.o_values[k],
                          path.z_values[k]);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", k * path.dt,
                          path.values[k]);
        }
        out << buf;
    }
}

DrivingPath load_driving_csv(std::istream& in) {
    DrivingPath path;
    std::string line;
    bool has_rho = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            double v = 0.0;
            if (std::sscanf(line.c_str(), "# kappa=%lg", &v) == 1) path.kappa = v;
            if (std::sscanf(line.c_str(), "# dt=%lg", &v) == 1) path.dt = v;
            if (std::sscanf(line.c_str(), "# rho=%lg", &v) == 1) {
                path.rho = v;
                has_rho = true;
            }
            continue;
        }
        if (line[0] == 't') continue;  // column header
        double t, w, o, z;
        if (has_rho) {
            if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg", &t, &w, &o, &z) != 4)
                throw DomainError("load_driving_csv: malformed row: " + line);
            path.o_values.push_back(o);
            path.z_values.push_back(z);
        } else {
            if (std::sscanf(line.c_str(), "%lg,%lg", &t, &w) != 2)
                throw DomainError("load_driving_csv: malformed row: " + line);
        }
        path.values.push_back(w);
    }
    if (path.values.empty()) throw DomainError("load_driving_csv: empty file");
    return path;
}

}  // namespace slelab

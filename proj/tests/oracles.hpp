#pragma once

// Independent reference computations for the tests (no library calls).

#include <cmath>
#include <functional>

namespace oracle {

inline double bisect(const std::function<double(double)>& f, double a, double b, int iters = 200) {
    double fa = f(a);
    for (int k = 0; k < iters; ++k) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Closed-form Bernoulli density (1 + eps^2 (gamma-1)(2 phi - G) / (2 gamma))^(1/(gamma-1)).
inline double rho(double G, double phi, double gamma, double eps) {
    return std::pow(1.0 + eps * eps * (gamma - 1.0) * (2.0 * phi - G) / (2.0 * gamma), 1.0 / (gamma - 1.0));
}

inline double mach(double q, double rho, double gamma, double eps) {
    return eps * q / std::sqrt(gamma * std::pow(rho, gamma - 1.0));
}

// Uniform speed q with flux 2 pi int_0^1 rho(q^2, phi(r)) q r dr = m0 (axisymmetric),
// by bisection below the sonic speed of the zero-force state.
inline double q_bar(double m0, double gamma, double eps, const std::function<double(double)>& phi = {}) {
    auto flux = [&](double q) {
        if (!phi) return M_PI * rho(q * q, 0.0, gamma, eps) * q;
        return simpson([&](double r) { return 2.0 * M_PI * r * rho(q * q, phi(r), gamma, eps) * q; }, 0.0, 1.0, 400);
    };
    const double q_sonic = std::sqrt(2.0 * gamma / (gamma + 1.0)) / eps;
    return bisect([&](double q) { return flux(q) - m0; }, 0.0, 0.999 * q_sonic);
}

}  // namespace oracle

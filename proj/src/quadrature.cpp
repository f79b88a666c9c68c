#include "levkit/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "levkit/constants.hpp"

namespace levkit::quadrature {

GaussLegendreRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    const int n = order;
    GaussLegendreRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);

    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root.
        double z = std::cos(constants::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

double integrate_adaptive(const std::function<double(double)>& f, double lower, double upper,
                          double rel_tol, int max_halvings) {
    if (!(upper >= lower)) throw std::invalid_argument("integrate_adaptive: bad interval");
    if (upper == lower) return 0.0;

    const double h0 = upper - lower;
    double trap = 0.5 * h0 * (f(lower) + f(upper));
    double prev_richardson = trap;
    std::size_t intervals = 1;
    for (int level = 1; level <= max_halvings; ++level) {
        const double h = h0 / static_cast<double>(2 * intervals);
        double sum = 0.0;
        for (std::size_t k = 0; k < intervals; ++k) {
            sum += f(lower + h * static_cast<double>(2 * k + 1));
        }
        const double refined = 0.5 * trap + h * sum;
        // Richardson extrapolation of the trapezoid pair (Romberg level 1).
        const double richardson = refined + (refined - trap) / 3.0;
        const double err = std::abs(richardson - prev_richardson);
        trap = refined;
        prev_richardson = richardson;
        intervals *= 2;
        if (level >= 4 && err <= rel_tol * std::max(std::abs(richardson), 1e-300)) {
            return richardson;
        }
    }
    return prev_richardson;
}

double integrate_to_infinity(const std::function<double(double)>& f, double lower,
                             double rel_tol) {
    // Finite head out to a point where the 1/x-substituted tail is smooth.
    const double split = std::max(lower + 1.0, 2.0 * std::abs(lower) + 10.0);
    const double head = integrate_adaptive(f, lower, split, rel_tol);
    const double tail = integrate_adaptive(
        [&f](double t) {
            if (t == 0.0) return 0.0;
            const double x = 1.0 / t;
            return f(x) * x * x;
        },
        0.0, 1.0 / split, rel_tol);
    return head + tail;
}

}  // namespace levkit::quadrature

#pragma once

#include <functional>
#include <vector>

namespace levkit::quadrature {

/// Nodes and weights on [-1, 1]; exact for polynomials up to degree 2n-1.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int order);

/// Trapezoid with interval halving and a Richardson error check; stops when
/// the extrapolated correction is below rel_tol of the running value.
double integrate_adaptive(const std::function<double(double)>& f, double lower, double upper,
                          double rel_tol = 1e-9, int max_halvings = 24);

/// Integral over [lower, inf) for integrands decaying at least as 1/x^2:
/// adaptive piece on a finite interval plus a 1/x-substituted tail.
double integrate_to_infinity(const std::function<double(double)>& f, double lower,
                             double rel_tol = 1e-9);

}  // namespace levkit::quadrature

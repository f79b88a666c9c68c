#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "levkit/quadrature.hpp"

using namespace levkit;
using Catch::Approx;

TEST_CASE("Gauss-Legendre integrates polynomials exactly", "[quadrature]") {
    for (int order : {2, 5, 8, 16, 32}) {
        const auto rule = quadrature::gauss_legendre(order);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(order));

        // exact through degree 2n-1
        for (int degree = 0; degree <= 2 * order - 1; ++degree) {
            double acc = 0.0;
            for (int i = 0; i < order; ++i) {
                acc += rule.weights[i] * std::pow(rule.nodes[i], degree);
            }
            const double exact = (degree % 2 == 1) ? 0.0 : 2.0 / (degree + 1.0);
            CHECK(acc == Approx(exact).margin(1e-12));
        }
    }
}

TEST_CASE("Gauss-Legendre nodes are symmetric and weights positive", "[quadrature]") {
    const auto rule = quadrature::gauss_legendre(32);
    for (int i = 0; i < 32; ++i) {
        CHECK(rule.weights[i] > 0.0);
        CHECK(rule.nodes[i] == Approx(-rule.nodes[31 - i]).margin(1e-15));
    }
}

TEST_CASE("adaptive trapezoid handles smooth and peaked integrands", "[quadrature]") {
    const double smooth = quadrature::integrate_adaptive(
        [](double x) { return std::sin(x); }, 0.0, 3.14159265358979323846, 1e-10);
    CHECK(smooth == Approx(2.0).epsilon(1e-9));

    // narrow Lorentzian, analytic area arctan-based
    const double w = 1e-3;
    const double peaked = quadrature::integrate_adaptive(
        [w](double x) { return w / (w * w + (x - 0.5) * (x - 0.5)); }, 0.0, 1.0, 1e-9, 40);
    const double exact = std::atan(0.5 / w) - std::atan(-0.5 / w);
    CHECK(peaked == Approx(exact).epsilon(1e-6));
}

TEST_CASE("semi-infinite integration matches closed forms", "[quadrature]") {
    const double gaussian_tail = quadrature::integrate_to_infinity(
        [](double x) { return std::exp(-x * x); }, 0.0, 1e-10);
    CHECK(gaussian_tail == Approx(0.5 * std::sqrt(3.14159265358979323846)).epsilon(1e-8));

    const double inv_quartic = quadrature::integrate_to_infinity(
        [](double x) { return 1.0 / (1.0 + x * x * x * x); }, 0.0, 1e-10);
    CHECK(inv_quartic == Approx(3.14159265358979323846 / (2.0 * std::sqrt(2.0))).epsilon(1e-8));
}

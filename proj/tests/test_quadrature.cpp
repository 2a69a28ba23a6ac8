#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>

#include "lz/quadrature.hpp"

namespace {

double integrate(int n, double a, double b, double (*f)(double)) {
    const lz::GaussLegendreRule rule = lz::gauss_legendre_on(n, a, b);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        sum += rule.weights[k] * f(rule.nodes[k]);
    }
    return sum;
}

}  // namespace

TEST_CASE("rule geometry: ascending interior nodes, positive weights") {
    for (int n : {1, 2, 5, 16, 40, 87}) {
        const lz::GaussLegendreRule rule = lz::gauss_legendre_on(n, -2.0, 3.5);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
        REQUIRE(rule.weights.size() == static_cast<std::size_t>(n));
        double weight_sum = 0.0;
        for (int k = 0; k < n; ++k) {
            CHECK(rule.nodes[k] > -2.0);
            CHECK(rule.nodes[k] < 3.5);
            if (k > 0) CHECK(rule.nodes[k] > rule.nodes[k - 1]);
            CHECK(rule.weights[k] > 0.0);
            weight_sum += rule.weights[k];
        }
        CHECK(weight_sum == doctest::Approx(5.5).epsilon(1e-14));
    }
}

TEST_CASE("nodes are symmetric about the midpoint") {
    const lz::GaussLegendreRule rule = lz::gauss_legendre(9);
    for (int k = 0; k < 9; ++k) {
        CHECK(rule.nodes[k] == doctest::Approx(-rule.nodes[8 - k]).epsilon(1e-15));
        CHECK(rule.weights[k] ==
              doctest::Approx(rule.weights[8 - k]).epsilon(1e-15));
    }
}

TEST_CASE("n-point rule integrates polynomials up to degree 2n-1 exactly") {
    // int_a^b x^p dx against the monomial antiderivative.
    for (int n = 1; n <= 8; ++n) {
        const double a = -1.3;
        const double b = 2.1;
        const lz::GaussLegendreRule rule = lz::gauss_legendre_on(n, a, b);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double sum = 0.0;
            for (int k = 0; k < n; ++k) {
                sum += rule.weights[k] * std::pow(rule.nodes[k], p);
            }
            const double exact =
                (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
            CHECK(sum == doctest::Approx(exact).epsilon(1e-12));
        }
    }
}

TEST_CASE("classic integrals") {
    CHECK(integrate(16, 0.0, M_PI, [](double x) { return std::sin(x); }) ==
          doctest::Approx(2.0).epsilon(1e-15));
    CHECK(integrate(24, 0.0, 1.0, [](double x) { return std::exp(x); }) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    // Oscillatory integrand: n = 36 resolves cos(40 x) on [0, 1].
    CHECK(integrate(36, 0.0, 1.0, [](double x) { return std::cos(40.0 * x); }) ==
          doctest::Approx(std::sin(40.0) / 40.0).epsilon(1e-10));
}

TEST_CASE("agrees with the boost gauss rule") {
    const auto f = [](double x) { return std::cos(3.0 * x) / (1.0 + x * x); };
    for (double b : {1.0, 2.5}) {
        const double mine = [&] {
            const lz::GaussLegendreRule rule = lz::gauss_legendre_on(15, 0.0, b);
            double sum = 0.0;
            for (int k = 0; k < 15; ++k) sum += rule.weights[k] * f(rule.nodes[k]);
            return sum;
        }();
        const double reference =
            boost::math::quadrature::gauss<double, 15>::integrate(f, 0.0, b);
        CHECK(mine == doctest::Approx(reference).epsilon(1e-14));
    }
}

TEST_CASE("invalid node count throws") {
    CHECK_THROWS_AS(lz::gauss_legendre(0), std::invalid_argument);
    CHECK_THROWS_AS(lz::gauss_legendre(-3), std::invalid_argument);
}

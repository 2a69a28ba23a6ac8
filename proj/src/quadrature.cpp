#include "lz/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lz {
namespace {

// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

GaussLegendreRule compute_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
        return rule;
    }
    const int half = (n + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Tricomi-style initial guess for the k-th positive-side root.
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const auto [p, d] = legendre_with_derivative(n, x);
            dp = d;
            const double dx = p / d;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                const auto [p2, d2] = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - k] = x;
        rule.weights[n - 1 - k] = w;
        rule.nodes[k] = -x;
        rule.weights[k] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
        const auto [p, d] = legendre_with_derivative(n, 0.0);
        (void)p;
        rule.weights[n / 2] = 2.0 / (d * d);
    }
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: need n >= 1");
    }
    static std::mutex mtx;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, compute_rule(n)).first;
    }
    return it->second;
}

GaussLegendreRule gauss_legendre_on(int n, double a, double b) {
    const GaussLegendreRule& base = gauss_legendre(n);
    GaussLegendreRule out;
    out.nodes.resize(n);
    out.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        out.nodes[i] = mid + half * base.nodes[i];
        out.weights[i] = half * base.weights[i];
    }
    return out;
}

}  // namespace lz

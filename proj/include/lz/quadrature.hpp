#ifndef LZ_QUADRATURE_HPP
#define LZ_QUADRATURE_HPP

#include <vector>

namespace lz {

/// Gauss-Legendre rule on [-1, 1]. Nodes are ascending.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Returns the n-point rule, computed once per n and cached.
/// Thread-safe. n >= 1.
const GaussLegendreRule& gauss_legendre(int n);

/// Nodes/weights of the n-point rule mapped to [a, b].
GaussLegendreRule gauss_legendre_on(int n, double a, double b);

}  // namespace lz

#endif  // LZ_QUADRATURE_HPP

#include "lz/linalg2.hpp"

#include <algorithm>
#include <cmath>

namespace lz {

double Complex2x2::max_abs_diff(const Complex2x2& o) const {
    return std::max({std::abs(a - o.a), std::abs(b - o.b),
                     std::abs(c - o.c), std::abs(d - o.d)});
}

bool Complex2x2::is_hermitian(double tol) const {
    return std::abs(std::imag(a)) <= tol && std::abs(std::imag(d)) <= tol &&
           std::abs(b - std::conj(c)) <= tol;
}

double Complex2x2::frobenius_norm() const {
    return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
}

State2 State2::normalized(complexd a0, complexd a1) {
    const double n = std::sqrt(std::norm(a0) + std::norm(a1));
    if (!(n > 1e-14) || !std::isfinite(n)) {
        throw std::invalid_argument("State2: cannot normalize a zero vector");
    }
    return {a0 / n, a1 / n};
}

double State2::norm() const {
    return std::sqrt(std::norm(up) + std::norm(dn));
}

Complex2x2 pauli(PauliAxis axis) {
    switch (axis) {
        case PauliAxis::X:
            return {0.0, 1.0, 1.0, 0.0};
        case PauliAxis::Y:
            return {0.0, complexd(0.0, -1.0), complexd(0.0, 1.0), 0.0};
        case PauliAxis::Z:
            return {1.0, 0.0, 0.0, -1.0};
    }
    throw std::invalid_argument("pauli: unknown axis");
}

Unitary2::Unitary2(const Complex2x2& m) : m_(m) {
    const Complex2x2 gram = m.adjoint() * m;
    if (gram.max_abs_diff(Complex2x2::identity()) > kUnitarityTol) {
        throw std::invalid_argument("Unitary2: U+U deviates from identity");
    }
    if (std::abs(std::abs(m.det()) - 1.0) > kUnitarityTol) {
        throw std::invalid_argument("Unitary2: |det| deviates from 1");
    }
}

Unitary2 expm_su2(double delta, double eps, double tau) {
    if (!std::isfinite(delta) || !std::isfinite(eps) || !std::isfinite(tau)) {
        throw std::invalid_argument("expm_su2: non-finite input");
    }
    if (!(delta > 0.0)) {
        throw std::invalid_argument("expm_su2: delta must be positive");
    }
    if (tau < 0.0) {
        throw std::invalid_argument("expm_su2: tau must be non-negative");
    }
    const double r = std::hypot(delta, eps);
    const double co = std::cos(r * tau);
    const double si = std::sin(r * tau) / r;
    // cos(r tau) I - i sin(r tau)/r * (delta sx + eps sz)
    return Unitary2(Complex2x2{complexd(co, -si * eps), complexd(0.0, -si * delta),
                               complexd(0.0, -si * delta), complexd(co, si * eps)});
}

Complex2x2 conjugate_by(const Unitary2& u, const Complex2x2& a) {
    return u.matrix().adjoint() * a * u.matrix();
}

}  // namespace lz

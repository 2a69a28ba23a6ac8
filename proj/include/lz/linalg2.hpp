#ifndef LZ_LINALG2_HPP
#define LZ_LINALG2_HPP

#include <complex>
#include <stdexcept>

namespace lz {

using complexd = std::complex<double>;

/// Dense complex 2x2 matrix with value semantics. Row-major entries
/// [[a, b], [c, d]]. This is all the linear algebra the Landau-Zener
/// system needs; nothing here generalizes to n > 2.
struct Complex2x2 {
    complexd a{0.0}, b{0.0}, c{0.0}, d{0.0};

    constexpr Complex2x2() = default;
    constexpr Complex2x2(complexd a_, complexd b_, complexd c_, complexd d_)
        : a(a_), b(b_), c(c_), d(d_) {}

    static constexpr Complex2x2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static constexpr Complex2x2 zero() { return {}; }

    // Hermitian by construction: real diagonal, mirrored off-diagonal.
    static Complex2x2 hermitian(double diag0, double diag1, complexd off) {
        return {complexd(diag0, 0.0), off, std::conj(off), complexd(diag1, 0.0)};
    }

    complexd trace() const { return a + d; }
    complexd det() const { return a * d - b * c; }
    Complex2x2 adjoint() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }

    Complex2x2 operator+(const Complex2x2& o) const {
        return {a + o.a, b + o.b, c + o.c, d + o.d};
    }
    Complex2x2 operator-(const Complex2x2& o) const {
        return {a - o.a, b - o.b, c - o.c, d - o.d};
    }
    Complex2x2 operator*(const Complex2x2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Complex2x2 operator*(complexd s) const { return {a * s, b * s, c * s, d * s}; }
    Complex2x2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    friend Complex2x2 operator*(complexd s, const Complex2x2& m) { return m * s; }
    friend Complex2x2 operator*(double s, const Complex2x2& m) { return m * s; }

    Complex2x2& operator+=(const Complex2x2& o) { return *this = *this + o; }
    Complex2x2& operator-=(const Complex2x2& o) { return *this = *this - o; }

    /// Largest entrywise absolute difference.
    double max_abs_diff(const Complex2x2& o) const;
    /// Entrywise comparison with an explicit absolute tolerance.
    bool approx_equal(const Complex2x2& o, double tol) const {
        return max_abs_diff(o) <= tol;
    }

    bool is_hermitian(double tol) const;
    double frobenius_norm() const;
};

/// Normalized two-component state vector (amplitudes on |0>, |1>).
struct State2 {
    complexd up{1.0}, dn{0.0};

    constexpr State2() = default;
    constexpr State2(complexd up_, complexd dn_) : up(up_), dn(dn_) {}

    static constexpr State2 basis0() { return {1.0, 0.0}; }
    static constexpr State2 basis1() { return {0.0, 1.0}; }

    /// Builds a unit-norm state from arbitrary amplitudes. Throws on a
    /// (near-)zero vector.
    static State2 normalized(complexd a0, complexd a1);

    double norm() const;
    /// <this|other>
    complexd inner(const State2& other) const {
        return std::conj(up) * other.up + std::conj(dn) * other.dn;
    }
    /// The state orthogonal to this one (unique up to phase in d=2).
    State2 orthogonal_complement() const {
        return {-std::conj(dn), std::conj(up)};
    }
    /// |this><other|
    Complex2x2 outer(const State2& other) const {
        return {up * std::conj(other.up), up * std::conj(other.dn),
                dn * std::conj(other.up), dn * std::conj(other.dn)};
    }

    friend State2 operator*(const Complex2x2& m, const State2& s) {
        return {m.a * s.up + m.b * s.dn, m.c * s.up + m.d * s.dn};
    }
};

enum class PauliAxis { X, Y, Z };

/// The standard Pauli matrix for the given axis.
Complex2x2 pauli(PauliAxis axis);

/// A Complex2x2 whose unitarity was checked on construction:
/// U+U = I within 1e-10 entrywise and |det U| = 1 within 1e-10.
class Unitary2 {
public:
    static constexpr double kUnitarityTol = 1e-10;

    explicit Unitary2(const Complex2x2& m);

    static Unitary2 identity() { return Unitary2(Complex2x2::identity()); }

    const Complex2x2& matrix() const { return m_; }
    Unitary2 adjoint() const { return Unitary2(m_.adjoint(), Checked{}); }

    Unitary2 operator*(const Unitary2& o) const {
        return Unitary2(m_ * o.m_, Checked{});
    }
    friend State2 operator*(const Unitary2& u, const State2& s) {
        return u.m_ * s;
    }

private:
    struct Checked {};
    Unitary2(const Complex2x2& m, Checked) : m_(m) {}
    Complex2x2 m_;
};

/// exp(-i tau (delta*sigma_x + eps*sigma_z)), evaluated in closed form:
/// cos(r tau) I - i sin(r tau) (delta*sigma_x + eps*sigma_z)/r with
/// r = sqrt(delta^2 + eps^2). Exact for any segment of a piecewise
/// constant control, so propagation carries no step-size error.
Unitary2 expm_su2(double delta, double eps, double tau);

/// U+ A U. Preserves trace and Hermiticity.
Complex2x2 conjugate_by(const Unitary2& u, const Complex2x2& a);

}  // namespace lz

#endif  // LZ_LINALG2_HPP

#include "lz/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lz/quadrature.hpp"

namespace lz {

namespace {

constexpr double kStateNormTol = 1e-12;
constexpr double kDensityTol = 1e-10;
constexpr double kHermitianTol = 1e-12;

/// Eigenvalues of a Hermitian 2x2, ascending.
std::pair<double, double> hermitian_eigenvalues(const Complex2x2& h) {
    const double m = 0.5 * std::real(h.trace());
    const double det = std::real(h.det());
    const double disc = std::sqrt(std::max(0.0, m * m - det));
    return {m - disc, m + disc};
}

complexd bra_op_ket(const State2& bra, const Complex2x2& op, const State2& ket) {
    return bra.inner(op * ket);
}

/// Unit eigenvector of the larger eigenvalue. Both rows of (H - hi)
/// give a solution; picking the larger one avoids cancellation (their
/// squared norms sum to at least hi - lo in the relevant factors).
State2 hermitian_top_eigenvector(const Complex2x2& h) {
    const double hi = hermitian_eigenvalues(h).second;
    const double a = std::real(h.a);
    const double d = std::real(h.d);
    const complexd v1_up = h.b;
    const double v1_dn = hi - a;
    const double v2_up = hi - d;
    const complexd v2_dn = std::conj(h.b);
    const double n1 = std::norm(v1_up) + v1_dn * v1_dn;
    const double n2 = v2_up * v2_up + std::norm(v2_dn);
    if (n1 <= 0.0 && n2 <= 0.0) return State2::basis0();  // scalar matrix
    if (n1 >= n2) return State2::normalized(v1_up, v1_dn);
    return State2::normalized(v2_up, v2_dn);
}

}  // namespace

TransitionObjective::TransitionObjective(const State2& initial_,
                                         const State2& target_)
    : initial(initial_), target(target_) {
    if (std::abs(initial.norm() - 1.0) > kStateNormTol ||
        std::abs(target.norm() - 1.0) > kStateNormTol) {
        throw std::invalid_argument(
            "TransitionObjective: states must be normalized");
    }
}

ObservableObjective::ObservableObjective(const Complex2x2& rho0_,
                                         const Complex2x2& observable_)
    : rho0(rho0_), observable(observable_) {
    if (!rho0.is_hermitian(kDensityTol)) {
        throw std::invalid_argument("ObservableObjective: rho0 not Hermitian");
    }
    if (std::abs(rho0.trace() - complexd(1.0)) > kDensityTol) {
        throw std::invalid_argument("ObservableObjective: rho0 trace != 1");
    }
    if (hermitian_eigenvalues(rho0).first < -kDensityTol) {
        throw std::invalid_argument(
            "ObservableObjective: rho0 has a negative eigenvalue");
    }
    if (!observable.is_hermitian(kHermitianTol)) {
        throw std::invalid_argument(
            "ObservableObjective: observable not Hermitian");
    }
}

double evaluate(const ObjectiveSpec& spec, const Unitary2& u_final) {
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, TransitionObjective>) {
                const complexd g = bra_op_ket(s.target, u_final.matrix(), s.initial);
                return std::norm(g);
            } else if constexpr (std::is_same_v<S, ObservableObjective>) {
                // Tr[U rho U+ O] = Tr[rho (U+ O U)]
                return std::real(
                    (s.rho0 * conjugate_by(u_final, s.observable)).trace());
            } else {
                const complexd g =
                    0.5 * (s.target.adjoint() * u_final).matrix().trace();
                return std::norm(g);
            }
        },
        spec);
}

double evaluate(const ObjectiveSpec& spec, const PropagationTrace& trace) {
    return evaluate(spec, trace.final_unitary());
}

std::pair<double, double> objective_range(const ObjectiveSpec& spec) {
    if (const auto* obs = std::get_if<ObservableObjective>(&spec)) {
        const auto [p_lo, p_hi] = hermitian_eigenvalues(obs->rho0);
        const auto [l_lo, l_hi] = hermitian_eigenvalues(obs->observable);
        // Best/worst unitary orbit values: pair eigenvalues sorted
        // alike for the max, opposed for the min.
        return {p_hi * l_lo + p_lo * l_hi, p_hi * l_hi + p_lo * l_lo};
    }
    return {0.0, 1.0};
}

double complement(const ObjectiveSpec& spec, const Unitary2& u_final) {
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, TransitionObjective>) {
                // 1 - J = |<f_perp|U|i>|^2 by unitarity.
                const complexd r = bra_op_ket(s.target.orthogonal_complement(),
                                              u_final.matrix(), s.initial);
                return std::norm(r);
            } else if constexpr (std::is_same_v<S, ObservableObjective>) {
                // J_max - J = (p_hi - p_lo)(l_hi - l_lo) |<v_lo|U|r_hi>|^2
                // in the eigenbases of rho0 (r) and O (v).
                const auto [p_lo, p_hi] = hermitian_eigenvalues(s.rho0);
                const auto [l_lo, l_hi] = hermitian_eigenvalues(s.observable);
                const State2 r_hi = hermitian_top_eigenvector(s.rho0);
                const State2 v_lo = hermitian_top_eigenvector(s.observable)
                                        .orthogonal_complement();
                const complexd r = bra_op_ket(v_lo, u_final.matrix(), r_hi);
                return (p_hi - p_lo) * (l_hi - l_lo) * std::norm(r);
            } else {
                // 1 - J_W = ||V - (tr V / 2) I||_F^2 / 2 for unitary
                // V = W+U, since ||V||_F^2 = 2.
                const Complex2x2 v = (s.target.adjoint() * u_final).matrix();
                const Complex2x2 p =
                    v - (0.5 * v.trace()) * Complex2x2::identity();
                return 0.5 * (std::norm(p.a) + std::norm(p.b) +
                              std::norm(p.c) + std::norm(p.d));
            }
        },
        spec);
}

namespace {

/// Constant kernel K such that the gradient kernel is
/// l(t) = Im tr(V_t K) for every objective kind. Derived from the
/// first-order variation dU_T = -i U_T int V_t delta_eps(t) dt.
Complex2x2 gradient_kernel(const ObjectiveSpec& spec, const Unitary2& u_final) {
    return std::visit(
        [&](const auto& s) -> Complex2x2 {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, TransitionObjective>) {
                const complexd g =
                    bra_op_ket(s.target, u_final.matrix(), s.initial);
                return (2.0 * std::conj(g)) *
                       (s.initial.outer(s.target) * u_final.matrix());
            } else if constexpr (std::is_same_v<S, ObservableObjective>) {
                const Complex2x2 o_t = conjugate_by(u_final, s.observable);
                return s.rho0 * o_t - o_t * s.rho0;
            } else {
                const Complex2x2 wu = (s.target.adjoint() * u_final).matrix();
                return (0.5 * std::conj(wu.trace())) * wu;
            }
        },
        spec);
}

double kernel_value(const Complex2x2& v, const Complex2x2& k) {
    // Im tr(V K) without forming the product matrix.
    return std::imag(v.a * k.a + v.b * k.c + v.c * k.b + v.d * k.d);
}

}  // namespace

double GradientSample::kernel_sup() const {
    double m = 0.0;
    for (double v : kernel) m = std::max(m, std::abs(v));
    return m;
}

double GradientSample::segment_sup() const {
    double m = 0.0;
    for (double v : segment) m = std::max(m, std::abs(v));
    return m;
}

GradientSample gradient(const ObjectiveSpec& spec, const PropagationTrace& trace) {
    const Complex2x2 k = gradient_kernel(spec, trace.final_unitary());
    const Complex2x2 sz = pauli(PauliAxis::Z);

    GradientSample out;
    out.times.reserve(trace.total_nodes());
    out.kernel.reserve(trace.total_nodes());
    out.segment.reserve(trace.nodes.size());

    for (const auto& seg : trace.nodes) {
        double acc = 0.0;
        for (std::size_t j = 0; j < seg.times.size(); ++j) {
            const double l = kernel_value(conjugate_by(seg.unitaries[j], sz), k);
            out.times.push_back(seg.times[j]);
            out.kernel.push_back(l);
            acc += seg.weights[j] * l;
        }
        out.segment.push_back(acc);
    }
    return out;
}

std::vector<std::pair<double, double>> hessian_diagonal(
    const ObjectiveSpec& spec, const PropagationTrace& trace) {
    if (std::holds_alternative<ObservableObjective>(spec)) {
        throw std::invalid_argument(
            "hessian_diagonal: no closed form for observable objectives");
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(trace.total_nodes());

    if (std::holds_alternative<GateObjective>(spec)) {
        for (const auto& seg : trace.nodes) {
            for (double t : seg.times) out.emplace_back(t, -2.0);
        }
        return out;
    }

    const auto& tr = std::get<TransitionObjective>(spec);
    const State2 i_perp = tr.initial.orthogonal_complement();
    const Complex2x2 sz = pauli(PauliAxis::Z);
    for (const auto& seg : trace.nodes) {
        for (std::size_t j = 0; j < seg.times.size(); ++j) {
            const Complex2x2 v = conjugate_by(seg.unitaries[j], sz);
            const complexd off = bra_op_ket(tr.initial, v, i_perp);
            out.emplace_back(seg.times[j], -2.0 * std::norm(off));
        }
    }
    return out;
}

std::string to_string(Criticality c) {
    switch (c) {
        case Criticality::GlobalMax: return "GlobalMax";
        case Criticality::GlobalMin: return "GlobalMin";
        case Criticality::ZeroControl: return "ZeroControl";
        case Criticality::NotCritical: return "NotCritical";
        case Criticality::Unresolved: return "Unresolved";
    }
    return "Unresolved";
}

CriticalityVerdict classify_critical(const ObjectiveSpec& spec,
                                     const PropagationTrace& trace,
                                     const CriticalityTolerances& tol) {
    const GradientSample g = gradient(spec, trace);

    CriticalityVerdict verdict;
    verdict.objective = evaluate(spec, trace);
    verdict.gradient_sup = g.segment_sup();
    verdict.kernel_sup = g.kernel_sup();
    verdict.pulse_sup = trace.pulse.sup_norm();

    if (verdict.gradient_sup >= tol.grad) {
        verdict.kind = Criticality::NotCritical;
        return verdict;
    }
    const auto [lo, hi] = objective_range(spec);
    if (verdict.objective >= hi - tol.value) {
        verdict.kind = Criticality::GlobalMax;
    } else if (verdict.objective <= lo + tol.value) {
        verdict.kind = Criticality::GlobalMin;
    } else if (verdict.pulse_sup < tol.zero_control) {
        verdict.kind = Criticality::ZeroControl;
    } else {
        verdict.kind = Criticality::Unresolved;
    }
    return verdict;
}

Variation Variation::from_pulse(const ControlPulse& pulse) {
    Variation v;
    v.pieces.reserve(pulse.segments());
    for (int k = 0; k < pulse.segments(); ++k) {
        const double a = pulse.amplitudes[k];
        v.pieces.push_back({pulse.boundaries[k], pulse.boundaries[k + 1],
                            [a](double) { return a; }});
    }
    return v;
}

Variation Variation::indicator(double t0, double t1) {
    Variation v;
    v.pieces.push_back({t0, t1, [](double) { return 1.0; }});
    return v;
}

Variation Variation::scaled(double s) const {
    Variation v;
    v.pieces.reserve(pieces.size());
    for (const auto& p : pieces) {
        auto shape = p.shape;
        v.pieces.push_back(
            {p.t0, p.t1, [shape, s](double t) { return s * shape(t); }});
    }
    return v;
}

double Variation::support_end() const {
    return pieces.empty() ? 0.0 : pieces.back().t1;
}

double Variation::operator()(double t) const {
    // Half-open pieces [t0, t1), matching ControlPulse::amplitude_at:
    // a shared boundary belongs to the piece starting there, and the
    // right end of the final piece is closed.
    for (const auto& p : pieces) {
        if (t >= p.t0 && t < p.t1) return p.shape(t);
    }
    if (!pieces.empty() && t == pieces.back().t1) {
        return pieces.back().shape(t);
    }
    return 0.0;
}

namespace {

void check_variation(const Variation& v) {
    double prev_end = 0.0;
    for (const auto& p : v.pieces) {
        if (!(p.t0 < p.t1) || p.t0 < -1e-15 || !p.shape) {
            throw std::invalid_argument("Variation: bad piece interval");
        }
        if (p.t0 < prev_end - 1e-15) {
            throw std::invalid_argument(
                "Variation: pieces must be ascending and disjoint");
        }
        prev_end = p.t1;
    }
}

Complex2x2 free_V(double t) {
    return conjugate_by(expm_su2(1.0, 0.0, t), pauli(PauliAxis::Z));
}

}  // namespace

SecondOrderExpansion second_order_expansion(const TransitionObjective& spec,
                                            const Variation& variation, double T,
                                            int nodes_per_axis) {
    check_variation(variation);
    if (nodes_per_axis < 2) {
        throw std::invalid_argument(
            "second_order_expansion: need at least 2 nodes per axis");
    }
    if (T < variation.support_end() - 1e-12) {
        throw std::invalid_argument(
            "second_order_expansion: horizon shorter than the variation support");
    }

    const GaussLegendreRule& base = gauss_legendre(nodes_per_axis);

    Complex2x2 a1;      // int delta_eps(t) V_t dt (times -i at the end)
    Complex2x2 a2;      // int_{t2<t1} ... (times -1 at the end)
    Complex2x2 prefix;  // int_0^{piece start} delta_eps V, accumulated

    for (const auto& piece : variation.pieces) {
        const double mid = 0.5 * (piece.t0 + piece.t1);
        const double half = 0.5 * (piece.t1 - piece.t0);
        Complex2x2 piece_integral;
        for (int j = 0; j < nodes_per_axis; ++j) {
            const double t1 = mid + half * base.nodes[j];
            const double w1 = half * base.weights[j];
            const double f1 = piece.shape(t1);
            const Complex2x2 v1 = free_V(t1);

            // Inner integral int_0^{t1} delta_eps(t2) V_t2 dt2: earlier
            // pieces contribute `prefix`, the partial current piece a
            // fresh rule on [piece.t0, t1].
            Complex2x2 inner = prefix;
            const double imid = 0.5 * (piece.t0 + t1);
            const double ihalf = 0.5 * (t1 - piece.t0);
            for (int m = 0; m < nodes_per_axis; ++m) {
                const double t2 = imid + ihalf * base.nodes[m];
                const double w2 = ihalf * base.weights[m];
                inner += (w2 * piece.shape(t2)) * free_V(t2);
            }

            a1 += (w1 * f1) * v1;
            a2 += (w1 * f1) * (v1 * inner);
            piece_integral += (w1 * f1) * v1;
        }
        prefix += piece_integral;
    }

    const Complex2x2 a1_full = complexd(0.0, -1.0) * a1;
    const Complex2x2 a2_full = -1.0 * a2;

    const Unitary2 u_free = expm_su2(1.0, 0.0, T);
    const complexd g0 = bra_op_ket(spec.target, u_free.matrix(), spec.initial);
    const complexd g1 =
        bra_op_ket(spec.target, u_free.matrix() * a1_full, spec.initial);
    const complexd g2 =
        bra_op_ket(spec.target, u_free.matrix() * a2_full, spec.initial);

    SecondOrderExpansion out;
    out.dJ1 = 2.0 * std::real(std::conj(g0) * g1);
    out.dJ2 = std::norm(g1) + 2.0 * std::real(std::conj(g0) * g2);
    out.alpha = 2.0 * std::imag(
        std::conj(g0) *
        bra_op_ket(spec.target, u_free.matrix() * pauli(PauliAxis::X),
                   spec.initial));
    return out;
}

}  // namespace lz

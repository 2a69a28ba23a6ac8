#ifndef LZ_OBJECTIVES_HPP
#define LZ_OBJECTIVES_HPP

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lz/dynamics.hpp"
#include "lz/linalg2.hpp"

namespace lz {

/// J = |<f|U_T|i>|^2. States are validated to be normalized.
struct TransitionObjective {
    State2 initial;
    State2 target;
    TransitionObjective(const State2& initial_, const State2& target_);
};

/// J = Tr[U_T rho0 U_T^dagger O]. rho0 must be a density matrix
/// (Hermitian, PSD, unit trace); O must be Hermitian.
struct ObservableObjective {
    Complex2x2 rho0;
    Complex2x2 observable;
    ObservableObjective(const Complex2x2& rho0_, const Complex2x2& observable_);
};

/// J = |Tr(W^dagger U_T)|^2 / 4, normalized so the exact gate gives 1.
struct GateObjective {
    Unitary2 target;
    explicit GateObjective(const Unitary2& target_) : target(target_) {}
};

using ObjectiveSpec =
    std::variant<TransitionObjective, ObservableObjective, GateObjective>;

/// Objective value from the final propagator alone (cheap path: line
/// searches and Monte Carlo noise samples never need the full trace).
double evaluate(const ObjectiveSpec& spec, const Unitary2& u_final);
double evaluate(const ObjectiveSpec& spec, const PropagationTrace& trace);

/// Attainable [min, max] over all unitaries: [0, 1] for transition and
/// gate; for an observable, the von Neumann pairing of the eigenvalues
/// of rho0 and O.
std::pair<double, double> objective_range(const ObjectiveSpec& spec);

/// Distance to the attainable maximum, J_max - J, in a
/// cancellation-free form: the squared overlap with the complementary
/// component (|<f_perp|U|i>|^2 for a transition; ||V - (tr V/2) I||_F^2 / 2
/// with V = W+U for a gate, an exact identity for unitary V; the
/// eigenvector-resolved analogue for an observable). Unlike
/// J_max - evaluate(...), this keeps full relative precision as J
/// approaches the maximum, which the optimizer's line search needs to
/// make progress below ulp(J_max).
double complement(const ObjectiveSpec& spec, const Unitary2& u_final);

/// Gradient of J with respect to the control, sampled on the trace's
/// quadrature nodes, plus the per-segment components dJ/da_k obtained
/// by Gauss-Legendre aggregation of the kernel over each segment.
struct GradientSample {
    std::vector<double> times;     // all node times, ascending
    std::vector<double> kernel;    // l(t) = dJ/d eps(t) at each node
    std::vector<double> segment;   // dJ/da_k, one per segment

    double kernel_sup() const;
    double segment_sup() const;
};

GradientSample gradient(const ObjectiveSpec& spec, const PropagationTrace& trace);

/// Equal-time diagonal H0(t, t) of the second functional derivative at
/// the trace's quadrature nodes. Valid at optimal controls:
/// -2 |<i|V_t|i_perp>|^2 for transition (in [-2, 0]), constantly -2 for
/// gate. No closed form is available for observable specs.
std::vector<std::pair<double, double>> hessian_diagonal(
    const ObjectiveSpec& spec, const PropagationTrace& trace);

/// The landscape trichotomy, as a runtime classifier: a critical
/// control can only sit at the objective's global maximum, its global
/// minimum, or the zero control. Anything else that looks critical is
/// Unresolved and must be treated as a reportable anomaly.
enum class Criticality { GlobalMax, GlobalMin, ZeroControl, NotCritical, Unresolved };

std::string to_string(Criticality c);

struct CriticalityTolerances {
    /// Sup-norm threshold on the per-segment gradient components (the
    /// gradient a finite-dimensional search can actually drive to
    /// zero; the node kernel vanishes pointwise only in the
    /// rich-family limit).
    double grad = 1e-8;
    /// Distance from the range endpoints that still counts as max/min.
    double value = 1e-6;
    /// Pulse sup-norm below which the control counts as zero.
    double zero_control = 1e-6;
};

struct CriticalityVerdict {
    Criticality kind = Criticality::NotCritical;
    double objective = 0.0;     // J at the trace
    double gradient_sup = 0.0;  // max_k |dJ/da_k|
    double kernel_sup = 0.0;    // max_t |l(t)| over nodes
    double pulse_sup = 0.0;     // max_k |a_k|
};

CriticalityVerdict classify_critical(const ObjectiveSpec& spec,
                                     const PropagationTrace& trace,
                                     const CriticalityTolerances& tol = {});

/// A control variation delta_eps(t): a list of smooth pieces on
/// disjoint, ascending intervals; zero outside all pieces. Piecewise
/// constant pulses embed as one constant piece per segment, but smooth
/// shapes (e.g. cos(4t) on [0, pi]) are representable exactly, which
/// the second-order expansion tests need.
struct Variation {
    struct Piece {
        double t0;
        double t1;
        std::function<double(double)> shape;
    };
    std::vector<Piece> pieces;

    static Variation from_pulse(const ControlPulse& pulse);
    static Variation indicator(double t0, double t1);

    Variation scaled(double s) const;
    double support_end() const;
    double operator()(double t) const;
};

/// First and second variations of the transition objective around the
/// zero control (free Hamiltonian sigma_x, unit coupling), computed by
/// Gauss-Legendre quadrature of the Dyson terms
///   A1 = -i int delta_eps(t) V_t dt,
///   A2 = -int_{t2<t1} delta_eps(t1) delta_eps(t2) V_t1 V_t2,
/// with V_t = e^{it sigma_x} sigma_z e^{-it sigma_x}. Also reports
/// alpha = L(sigma_x), the obstruction that makes the zero control a
/// saddle when nonzero.
struct SecondOrderExpansion {
    double dJ1 = 0.0;
    double dJ2 = 0.0;
    double alpha = 0.0;
};

SecondOrderExpansion second_order_expansion(const TransitionObjective& spec,
                                            const Variation& variation,
                                            double T, int nodes_per_axis = 64);

}  // namespace lz

#endif  // LZ_OBJECTIVES_HPP

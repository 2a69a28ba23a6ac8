#ifndef LZ_DYNAMICS_HPP
#define LZ_DYNAMICS_HPP

#include <utility>
#include <vector>

#include "lz/linalg2.hpp"

namespace lz {

/// Piecewise-constant control: eps(t) = a_k on [t_{k-1}, t_k).
/// Boundaries are strictly increasing with t_0 = 0 and t_N = T; there
/// is one amplitude per segment.
struct ControlPulse {
    std::vector<double> boundaries;  // size N+1, first 0, last T
    std::vector<double> amplitudes;  // size N

    ControlPulse() = default;
    /// Arbitrary grid. Throws std::invalid_argument on bad geometry.
    ControlPulse(std::vector<double> boundaries_, std::vector<double> amplitudes_);

    /// Uniform grid t_k = k T / N with the given amplitudes.
    static ControlPulse uniform(double T, std::vector<double> amplitudes_);
    /// Uniform grid with every amplitude zero.
    static ControlPulse zero(double T, int segments_);

    int segments() const { return static_cast<int>(amplitudes.size()); }
    double horizon() const { return boundaries.back(); }
    double duration(int k) const { return boundaries[k + 1] - boundaries[k]; }

    /// eps(t); segments are right-open except the last, which owns T.
    double amplitude_at(double t) const;

    /// Pulse energy integral of eps^2: sum a_k^2 (t_{k+1} - t_k).
    double energy() const;
    /// max_k |a_k|
    double sup_norm() const;

    /// The same control on a finer grid: every segment split into
    /// `factor` equal parts (identical dynamics, more knobs).
    ControlPulse refined(int factor) const;
};

/// Cumulative propagators for one pulse: U_t at every segment boundary
/// and at Gauss-Legendre quadrature nodes inside every segment. All
/// segment products use the closed-form SU(2) exponential, so the
/// boundary values are exact regardless of node density; the nodes
/// only set the resolution of time integrals built on top (gradients,
/// Hessian diagonals, noise sensitivities).
struct PropagationTrace {
    ControlPulse pulse;
    double delta = 1.0;

    /// U at t_0 .. t_N (size N+1, front() = identity).
    std::vector<Unitary2> boundary;

    struct SegmentNodes {
        std::vector<double> times;      // absolute node times, ascending
        std::vector<double> weights;    // matching quadrature weights
        std::vector<Unitary2> unitaries;  // U_t at each node
    };
    std::vector<SegmentNodes> nodes;  // size N

    const Unitary2& final_unitary() const { return boundary.back(); }
    int total_nodes() const;
};

/// Builds the trace. nodes_per_segment is a lower bound on the rule
/// size; segments whose accumulated phase 2 r tau is large get
/// proportionally more nodes so that the oscillatory integrands seen
/// by the objectives module stay resolved.
PropagationTrace propagate(const ControlPulse& pulse, double delta,
                           int nodes_per_segment = 16);

/// U_T alone (product of the closed-form segment factors, no nodes).
/// This is the cheap path for objective-only evaluation, e.g. inside
/// a line search or a Monte Carlo noise sample.
Unitary2 final_unitary(const ControlPulse& pulse, double delta);

/// U_T |psi0>.
State2 evolve_state(const PropagationTrace& trace, const State2& psi0);

/// V_t = U_t^dagger sigma_z U_t at every quadrature node, ordered by t.
std::vector<std::pair<double, Complex2x2>> sample_V(const PropagationTrace& trace);

}  // namespace lz

#endif  // LZ_DYNAMICS_HPP

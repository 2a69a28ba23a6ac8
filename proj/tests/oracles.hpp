#ifndef LZ_TEST_ORACLES_HPP
#define LZ_TEST_ORACLES_HPP

// Independent reference implementations used by the unit and
// acceptance tests. Everything here is deliberately built on different
// numerics than the library under test: series expansions instead of
// closed forms, finite differences instead of analytic gradients,
// dense grids instead of optimizers.

#include <cstdint>
#include <vector>

#include "lz/dynamics.hpp"
#include "lz/linalg2.hpp"
#include "lz/objectives.hpp"
#include "lz/rng.hpp"

namespace lz::testing {

/// Matrix exponential of an arbitrary 2x2 complex matrix by scaling
/// and squaring of the Taylor series. Independent of the SU(2) closed
/// form in the library.
Complex2x2 expm_taylor(const Complex2x2& a);

/// Central finite-difference gradient dJ/da_k of the objective over
/// the pulse amplitudes.
std::vector<double> fd_gradient(const ObjectiveSpec& spec,
                                const ControlPulse& pulse, double delta,
                                double h = 2e-5);

/// max_k |analytic_k - fd_k| / max_k |analytic_k|.
double fd_gradient_rel_error(const ObjectiveSpec& spec,
                             const ControlPulse& pulse, double delta,
                             double h = 2e-5, int nodes_per_segment = 16);

/// Finite-difference estimate of the equal-time Hessian diagonal
/// H0(t, t): a narrow amplitude bump of width `window` centred at t,
/// symmetric second difference in the bump height. t must lie strictly
/// inside a segment with window/2 clearance on both sides.
double fd_hessian_diagonal(const ObjectiveSpec& spec,
                           const ControlPulse& pulse, double delta, double t,
                           double window = 5e-3, double h = 5e-2);

/// J(s * variation) around the zero control by exact propagation of a
/// midpoint staircase of the variation (`segments` steps over its
/// support, free evolution afterwards). delta = 1.
double nonlinear_objective(const TransitionObjective& spec,
                           const Variation& variation, double T, double s,
                           int segments = 2000);

/// Richardson-extrapolated second variation from two scales s1 > s2 >
/// 0, using symmetric second differences of nonlinear_objective (odd
/// orders cancel; the leading s^2 error term is eliminated by the
/// extrapolation).
double richardson_dj2(const TransitionObjective& spec,
                      const Variation& variation, double T, double s1 = 1e-2,
                      double s2 = 5e-3, int segments = 2000);

/// Supremum of the N=1 closed-form transition probability over
/// a in [-A, A], by dense grid plus local refinement.
double n1_landscape_sup(double T, double delta, double A,
                        int grid = 400001);

/// Brute-force basin-mass oracle for the N=1 trap experiment: the
/// fraction of [-A, A] (uniform start measure) whose gradient-flow
/// limit is a local maximum with J below `threshold`. Computed by
/// watershed on a dense grid of the closed-form landscape.
double n1_trapped_basin_mass(double T, double delta, double A,
                             double threshold, int grid = 400001);

/// One random (objective, pulse, delta) test case for gradient
/// verification. Cycles through transition / observable / gate kinds.
struct RandomCase {
    ObjectiveSpec spec;
    ControlPulse pulse;
    double delta;
};

RandomCase random_case(SplitMix64& rng);

}  // namespace lz::testing

#endif  // LZ_TEST_ORACLES_HPP

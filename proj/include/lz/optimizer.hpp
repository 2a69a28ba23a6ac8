#ifndef LZ_OPTIMIZER_HPP
#define LZ_OPTIMIZER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lz/dynamics.hpp"
#include "lz/objectives.hpp"

namespace lz {

struct OptimizerConfig {
    int max_iterations = 10000;
    /// Convergence threshold on max_k |dJ/da_k|.
    double grad_tolerance = 1e-8;
    double armijo_c = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 40;
    /// Initial inverse-Hessian scale; 0 means 1/max(1, |g0|).
    double initial_scale = 0.0;
    int nodes_per_segment = 16;

    void validate() const;
};

enum class Termination { Converged, LineSearchFailure, IterationCap, Abort };

std::string to_string(Termination t);

struct MaximizeResult {
    ControlPulse pulse;
    /// J at the initial point and after every accepted step
    /// (non-decreasing by construction).
    std::vector<double> trajectory;
    Termination reason = Termination::Abort;
    int iterations = 0;
    double final_objective = 0.0;
    double gradient_sup = 0.0;  // max_k |dJ/da_k| at the final point
    double kernel_sup = 0.0;    // max_t |l(t)| at the final point
    std::string diagnostic;     // non-empty only on Abort
};

/// Dense BFGS ascent over the segment amplitudes with a backtracking
/// Armijo line search. Amplitudes are unconstrained. Deterministic:
/// no randomness, pure function of its inputs.
MaximizeResult maximize(const ObjectiveSpec& spec, const ControlPulse& initial,
                        double delta, const OptimizerConfig& config = {});

struct TrapRunRecord {
    std::uint64_t seed = 0;  // this run's derived seed
    int n = 0;
    double T = 0.0;
    double delta = 1.0;
    double A = 0.0;  // initial amplitudes drawn uniformly from [-A, A]
    std::vector<double> initial_amplitudes;
    std::vector<double> final_amplitudes;
    double final_objective = 0.0;
    int iterations = 0;
    double gradient_sup = 0.0;
    Termination reason = Termination::Abort;
    bool trapped = false;  // finished below the trap threshold
    bool aborted = false;  // numerical abort; excluded from `trapped`
};

struct TrapStats {
    int n = 0;
    int runs = 0;
    int trapped = 0;
    int aborted = 0;
    double probability = 0.0;     // trapped / runs
    double standard_error = 0.0;  // sqrt(p(1-p)/runs)
};

struct TrapExperiment {
    TrapStats stats;
    std::vector<TrapRunRecord> records;  // ordered by run index
};

/// `runs` independent optimizations from uniform random starts in
/// [-A, A]^n. Per-run seeds are derived from base_seed by a counter
/// split, and records live in indexed slots, so the output is
/// bit-identical for any worker count.
TrapExperiment trap_probability(const ObjectiveSpec& spec, int n, double T,
                                double delta, double A, int runs,
                                std::uint64_t base_seed, int workers = 1,
                                const OptimizerConfig& config = {},
                                double trap_threshold = 0.99);

/// One scan axis: `count` evenly spaced points from lo to hi
/// (inclusive); lo == hi collapses to a single value.
struct AxisSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;
};

std::vector<double> axis_points(const AxisSpec& axis);

struct ScanResult {
    std::vector<double> a1;         // first-axis values (size n1)
    std::vector<double> a2;         // second-axis values (size n2; empty for 1-D)
    std::vector<double> objective;  // row-major, a1 outer, size n1*max(n2,1)
    /// Reference values sin^2(T r)/r^2 * delta^2 with r = sqrt(delta^2 + a^2);
    /// filled only for 1-D scans of the |0> -> |1> transition.
    std::vector<double> closed_form;
    double max_closed_form_discrepancy = 0.0;
};

/// Dense objective grid over one or two segment amplitudes of a
/// uniform pulse (N = number of axes).
ScanResult landscape_scan(const ObjectiveSpec& spec, double T, double delta,
                          const std::vector<AxisSpec>& axes);

/// Indices (i, j) of strict interior local maxima of a 2-D scan
/// (strictly greater than all 8 neighbors).
std::vector<std::pair<int, int>> local_maxima_2d(const ScanResult& scan);

/// N=1 transition probability |<1|U_T|0>|^2 for constant control a:
/// delta^2 sin^2(T sqrt(delta^2+a^2)) / (delta^2+a^2).
double closed_form_transition(double T, double delta, double a);

}  // namespace lz

#endif  // LZ_OPTIMIZER_HPP

#include "lz/optimizer.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>

#include "lz/parallel.hpp"
#include "lz/rng.hpp"

namespace lz {

void OptimizerConfig::validate() const {
    if (max_iterations < 1) {
        throw std::invalid_argument("OptimizerConfig: max_iterations must be >= 1");
    }
    if (!(armijo_c > 0.0 && armijo_c < 0.5)) {
        throw std::invalid_argument("OptimizerConfig: armijo_c must be in (0, 0.5)");
    }
    if (!(shrink > 0.0 && shrink < 1.0)) {
        throw std::invalid_argument("OptimizerConfig: shrink must be in (0, 1)");
    }
    if (max_backtracks < 1) {
        throw std::invalid_argument("OptimizerConfig: max_backtracks must be >= 1");
    }
    if (!(grad_tolerance > 0.0)) {
        throw std::invalid_argument("OptimizerConfig: grad_tolerance must be > 0");
    }
    if (initial_scale < 0.0) {
        throw std::invalid_argument("OptimizerConfig: initial_scale must be >= 0");
    }
    if (nodes_per_segment < 1) {
        throw std::invalid_argument("OptimizerConfig: nodes_per_segment must be >= 1");
    }
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "Converged";
        case Termination::LineSearchFailure: return "LineSearchFailure";
        case Termination::IterationCap: return "IterationCap";
        case Termination::Abort: return "Abort";
    }
    return "Abort";
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

bool all_finite(const Vec& a) {
    for (double v : a) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

/// Dense symmetric inverse-Hessian approximation for the minimization
/// of -J, stored row-major.
class InverseHessian {
public:
    explicit InverseHessian(int n) : n_(n), m_(n * n, 0.0) {}

    void reset(double scale) {
        std::fill(m_.begin(), m_.end(), 0.0);
        for (int k = 0; k < n_; ++k) m_[k * n_ + k] = scale;
    }

    /// out = B v
    Vec apply(const Vec& v) const {
        Vec out(n_, 0.0);
        for (int r = 0; r < n_; ++r) {
            double s = 0.0;
            const double* row = &m_[r * n_];
            for (int c = 0; c < n_; ++c) s += row[c] * v[c];
            out[r] = s;
        }
        return out;
    }

    /// Standard BFGS inverse update with step s and gradient difference
    /// y (minimization convention, s'y > 0 checked by the caller):
    /// B <- (I - rho s y')B(I - rho y s') + rho s s'.
    void update(const Vec& s, const Vec& y) {
        const double rho = 1.0 / dot(s, y);
        const Vec by = apply(y);
        const double yby = dot(y, by);
        // B - rho(s (By)' + (By) s') + rho^2 s (y'By) s' + rho s s'
        const double c2 = rho * rho * yby + rho;
        for (int r = 0; r < n_; ++r) {
            for (int c = 0; c < n_; ++c) {
                m_[r * n_ + c] +=
                    -rho * (s[r] * by[c] + by[r] * s[c]) + c2 * s[r] * s[c];
            }
        }
    }

private:
    int n_;
    std::vector<double> m_;
};

}  // namespace

MaximizeResult maximize(const ObjectiveSpec& spec, const ControlPulse& initial,
                        double delta, const OptimizerConfig& config) {
    config.validate();

    const int n = initial.segments();
    ControlPulse pulse = initial;

    MaximizeResult result;
    result.pulse = initial;

    auto abort_with = [&](const std::string& why) {
        result.reason = Termination::Abort;
        result.diagnostic = why;
        result.pulse = pulse;
        return result;
    };

    // All line-search decisions run on the complement q = J_max - J,
    // which keeps full relative precision near the maximum (J itself
    // cannot resolve improvements below ulp(J_max), which would stall
    // the gradient around 1e-8 instead of letting it converge).
    const double range_hi = objective_range(spec).second;
    PropagationTrace trace = propagate(pulse, delta, config.nodes_per_segment);
    double q = complement(spec, trace.final_unitary());
    GradientSample grad = gradient(spec, trace);
    if (!std::isfinite(q) || !all_finite(grad.segment)) {
        return abort_with("non-finite objective or gradient at the start");
    }
    // Best complement seen so far. Flat steps (below) may move the
    // iterate through points whose evaluated q wobbles by a few ulp, so
    // the reported trajectory is the running best, which keeps the
    // user-facing guarantee that the objective never decreases.
    double q_best = q;
    result.trajectory.push_back(range_hi - q_best);

    const double fallback_scale = 1.0 / std::max(1.0, norm2(grad.segment));
    const double scale =
        config.initial_scale > 0.0 ? config.initial_scale : fallback_scale;
    InverseHessian inv_hessian(n);
    inv_hessian.reset(scale);
    bool hessian_is_fresh = true;

    // Accepted steps whose J improvement rounds to zero; see the flat
    // branch of the line search below.
    int flat_streak = 0;
    constexpr int kMaxFlatStreak = 50;

    result.reason = Termination::IterationCap;
    int iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        if (grad.segment_sup() <= config.grad_tolerance) {
            result.reason = Termination::Converged;
            break;
        }

        Vec direction = inv_hessian.apply(grad.segment);
        double slope = dot(grad.segment, direction);
        if (!(slope > 0.0) || !all_finite(direction)) {
            // Not an ascent direction (lost positive definiteness);
            // fall back to scaled steepest ascent.
            inv_hessian.reset(scale);
            hessian_is_fresh = true;
            direction = inv_hessian.apply(grad.segment);
            slope = dot(grad.segment, direction);
        }

        // Backtracking Armijo search on q. At a trap, q stays O(1), so
        // once the required decrease falls below q's floating-point
        // resolution no step can be adjudicated by q at all; such flat
        // steps are accepted on a genuine contraction of the gradient
        // sup-norm instead. The evaluated q at nearby points wobbles by
        // a few ulp in a pattern that can sit uniformly above q at the
        // current iterate, so flat steps tolerate an increase of q up
        // to the noise floor; q_best caps the drift.
        const double noise_floor = 32.0 * DBL_EPSILON * q;
        const double phi = grad.segment_sup();
        bool accepted = false;
        bool flat_step = false;
        double step = 1.0;
        ControlPulse candidate = pulse;
        double q_next = q;
        PropagationTrace next_trace;
        GradientSample next_grad;
        bool have_next = false;
        for (int attempt = 0; attempt <= 1 && !accepted; ++attempt) {
            step = 1.0;
            for (int bt = 0; bt < config.max_backtracks; ++bt) {
                for (int k = 0; k < n; ++k) {
                    candidate.amplitudes[k] = pulse.amplitudes[k] + step * direction[k];
                }
                q_next = complement(spec, final_unitary(candidate, delta));
                if (!std::isfinite(q_next)) {
                    return abort_with("non-finite objective during line search");
                }
                const double required = config.armijo_c * step * slope;
                if (q - q_next >= required) {
                    accepted = true;
                    flat_step = false;
                    break;
                }
                if (required <= noise_floor && q_next <= q + noise_floor) {
                    next_trace =
                        propagate(candidate, delta, config.nodes_per_segment);
                    next_grad = gradient(spec, next_trace);
                    if (all_finite(next_grad.segment) &&
                        next_grad.segment_sup() < 0.95 * phi) {
                        accepted = true;
                        flat_step = true;
                        have_next = true;
                        break;
                    }
                }
                step *= config.shrink;
            }
            if (!accepted && attempt == 0 && !hessian_is_fresh) {
                // Quasi-Newton direction failed; retry once from a
                // fresh scaled-identity (steepest ascent) model.
                inv_hessian.reset(scale);
                hessian_is_fresh = true;
                direction = inv_hessian.apply(grad.segment);
                slope = dot(grad.segment, direction);
            } else {
                break;
            }
        }
        if (!accepted) {
            result.reason = Termination::LineSearchFailure;
            break;
        }
        flat_streak = flat_step ? flat_streak + 1 : 0;

        if (!have_next) {
            next_trace = propagate(candidate, delta, config.nodes_per_segment);
            next_grad = gradient(spec, next_trace);
        }
        if (!all_finite(next_grad.segment)) {
            return abort_with("non-finite gradient after accepted step");
        }

        // Minimization convention for -J: y = -(g' - g).
        Vec s(n), y(n);
        for (int k = 0; k < n; ++k) {
            s[k] = candidate.amplitudes[k] - pulse.amplitudes[k];
            y[k] = grad.segment[k] - next_grad.segment[k];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * norm2(s) * norm2(y)) {
            inv_hessian.update(s, y);
            hessian_is_fresh = false;
        }

        pulse = std::move(candidate);
        trace = std::move(next_trace);
        q = q_next;
        grad = std::move(next_grad);
        q_best = std::min(q_best, q);
        result.trajectory.push_back(range_hi - q_best);

        if (flat_streak >= kMaxFlatStreak) {
            result.reason = Termination::LineSearchFailure;
            ++iter;
            break;
        }
    }

    result.pulse = pulse;
    result.iterations = iter;
    result.final_objective = range_hi - q_best;
    result.gradient_sup = grad.segment_sup();
    result.kernel_sup = grad.kernel_sup();
    return result;
}

TrapExperiment trap_probability(const ObjectiveSpec& spec, int n, double T,
                                double delta, double A, int runs,
                                std::uint64_t base_seed, int workers,
                                const OptimizerConfig& config,
                                double trap_threshold) {
    if (runs < 1) throw std::invalid_argument("trap_probability: runs must be >= 1");
    if (n < 1) throw std::invalid_argument("trap_probability: n must be >= 1");
    if (A < 0.0) throw std::invalid_argument("trap_probability: A must be >= 0");
    config.validate();

    TrapExperiment experiment;
    experiment.records.resize(runs);

    run_indexed(runs, workers, [&](int run) {
        SplitMix64 rng(SplitMix64::derive_seed(base_seed, run));
        std::vector<double> init(n);
        for (int k = 0; k < n; ++k) init[k] = rng.uniform(-A, A);

        TrapRunRecord rec;
        rec.seed = SplitMix64::derive_seed(base_seed, run);
        rec.n = n;
        rec.T = T;
        rec.delta = delta;
        rec.A = A;
        rec.initial_amplitudes = init;

        const MaximizeResult res =
            maximize(spec, ControlPulse::uniform(T, init), delta, config);
        rec.final_amplitudes = res.pulse.amplitudes;
        rec.final_objective = res.final_objective;
        rec.iterations = res.iterations;
        rec.gradient_sup = res.gradient_sup;
        rec.reason = res.reason;
        rec.aborted = res.reason == Termination::Abort;
        rec.trapped = !rec.aborted && res.final_objective < trap_threshold;

        experiment.records[run] = std::move(rec);
    });

    TrapStats stats;
    stats.n = n;
    stats.runs = runs;
    for (const auto& rec : experiment.records) {
        if (rec.aborted) {
            ++stats.aborted;
        } else if (rec.trapped) {
            ++stats.trapped;
        }
    }
    stats.probability = static_cast<double>(stats.trapped) / runs;
    stats.standard_error =
        std::sqrt(stats.probability * (1.0 - stats.probability) / runs);
    experiment.stats = stats;
    return experiment;
}

std::vector<double> axis_points(const AxisSpec& axis) {
    if (axis.count < 1) {
        throw std::invalid_argument("AxisSpec: count must be >= 1");
    }
    if (!(axis.lo <= axis.hi)) {
        throw std::invalid_argument("AxisSpec: lo must be <= hi");
    }
    std::vector<double> pts(axis.count);
    if (axis.count == 1) {
        pts[0] = axis.lo;
        return pts;
    }
    for (int k = 0; k < axis.count; ++k) {
        pts[k] = axis.lo + (axis.hi - axis.lo) * k / (axis.count - 1);
    }
    pts.front() = axis.lo;
    pts.back() = axis.hi;
    return pts;
}

double closed_form_transition(double T, double delta, double a) {
    const double r2 = delta * delta + a * a;
    const double s = std::sin(T * std::sqrt(r2));
    return delta * delta * s * s / r2;
}

namespace {

bool is_basis_transition(const ObjectiveSpec& spec) {
    const auto* tr = std::get_if<TransitionObjective>(&spec);
    if (tr == nullptr) return false;
    return std::abs(std::abs(tr->initial.up) - 1.0) < 1e-12 &&
           std::abs(std::abs(tr->target.dn) - 1.0) < 1e-12;
}

}  // namespace

ScanResult landscape_scan(const ObjectiveSpec& spec, double T, double delta,
                          const std::vector<AxisSpec>& axes) {
    if (axes.empty() || axes.size() > 2) {
        throw std::invalid_argument("landscape_scan: need 1 or 2 axes");
    }

    ScanResult result;
    result.a1 = axis_points(axes[0]);
    if (axes.size() == 2) result.a2 = axis_points(axes[1]);

    if (axes.size() == 1) {
        result.objective.reserve(result.a1.size());
        const bool with_closed_form = is_basis_transition(spec);
        for (double a : result.a1) {
            const ControlPulse pulse = ControlPulse::uniform(T, {a});
            const double j = evaluate(spec, final_unitary(pulse, delta));
            result.objective.push_back(j);
            if (with_closed_form) {
                const double ref = closed_form_transition(T, delta, a);
                result.closed_form.push_back(ref);
                result.max_closed_form_discrepancy = std::max(
                    result.max_closed_form_discrepancy, std::abs(j - ref));
            }
        }
        return result;
    }

    result.objective.reserve(result.a1.size() * result.a2.size());
    for (double a1 : result.a1) {
        for (double a2 : result.a2) {
            const ControlPulse pulse = ControlPulse::uniform(T, {a1, a2});
            result.objective.push_back(evaluate(spec, final_unitary(pulse, delta)));
        }
    }
    return result;
}

std::vector<std::pair<int, int>> local_maxima_2d(const ScanResult& scan) {
    const int n1 = static_cast<int>(scan.a1.size());
    const int n2 = static_cast<int>(scan.a2.size());
    if (n2 == 0) {
        throw std::invalid_argument("local_maxima_2d: scan is not 2-D");
    }
    auto at = [&](int i, int j) { return scan.objective[i * n2 + j]; };

    std::vector<std::pair<int, int>> maxima;
    for (int i = 1; i + 1 < n1; ++i) {
        for (int j = 1; j + 1 < n2; ++j) {
            const double v = at(i, j);
            bool strict = true;
            for (int di = -1; di <= 1 && strict; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if (!(v > at(i + di, j + dj))) {
                        strict = false;
                        break;
                    }
                }
            }
            if (strict) maxima.emplace_back(i, j);
        }
    }
    return maxima;
}

}  // namespace lz

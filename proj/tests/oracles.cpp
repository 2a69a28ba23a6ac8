#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lz/optimizer.hpp"

namespace lz::testing {

Complex2x2 expm_taylor(const Complex2x2& a) {
    // Scale until the norm is small, exponentiate by Taylor series,
    // square back up.
    const double norm = a.frobenius_norm();
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.25) {
        scale *= 0.5;
        ++squarings;
    }
    const Complex2x2 x = scale * a;
    Complex2x2 term = Complex2x2::identity();
    Complex2x2 sum = Complex2x2::identity();
    for (int k = 1; k <= 24; ++k) {
        term = (1.0 / k) * (term * x);
        sum = sum + term;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

namespace {

double objective_at(const ObjectiveSpec& spec, const ControlPulse& pulse,
                    double delta) {
    return evaluate(spec, final_unitary(pulse, delta));
}

}  // namespace

std::vector<double> fd_gradient(const ObjectiveSpec& spec,
                                const ControlPulse& pulse, double delta,
                                double h) {
    std::vector<double> grad(pulse.amplitudes.size());
    ControlPulse probe = pulse;
    for (std::size_t k = 0; k < pulse.amplitudes.size(); ++k) {
        probe.amplitudes[k] = pulse.amplitudes[k] + h;
        const double plus = objective_at(spec, probe, delta);
        probe.amplitudes[k] = pulse.amplitudes[k] - h;
        const double minus = objective_at(spec, probe, delta);
        probe.amplitudes[k] = pulse.amplitudes[k];
        grad[k] = (plus - minus) / (2.0 * h);
    }
    return grad;
}

double fd_gradient_rel_error(const ObjectiveSpec& spec,
                             const ControlPulse& pulse, double delta, double h,
                             int nodes_per_segment) {
    const PropagationTrace trace = propagate(pulse, delta, nodes_per_segment);
    const GradientSample analytic = gradient(spec, trace);
    const std::vector<double> fd = fd_gradient(spec, pulse, delta, h);
    double max_diff = 0.0;
    double max_mag = 0.0;
    for (std::size_t k = 0; k < fd.size(); ++k) {
        max_diff = std::max(max_diff, std::abs(analytic.segment[k] - fd[k]));
        max_mag = std::max(max_mag, std::abs(analytic.segment[k]));
    }
    // Guard against the (never observed) fully-critical random pulse.
    return max_diff / std::max(max_mag, 1e-9);
}

namespace {

/// J with a bump of the given height on [t - w/2, t + w/2].
double bumped_objective(const ObjectiveSpec& spec, const ControlPulse& pulse,
                        double delta, int segment, double lo, double hi,
                        double bump) {
    std::vector<double> boundaries;
    std::vector<double> amplitudes;
    for (int k = 0; k < pulse.segments(); ++k) {
        boundaries.push_back(pulse.boundaries[k]);
        if (k == segment) {
            amplitudes.push_back(pulse.amplitudes[k]);
            boundaries.push_back(lo);
            amplitudes.push_back(pulse.amplitudes[k] + bump);
            boundaries.push_back(hi);
            amplitudes.push_back(pulse.amplitudes[k]);
        } else {
            amplitudes.push_back(pulse.amplitudes[k]);
        }
    }
    boundaries.push_back(pulse.horizon());
    return objective_at(spec, ControlPulse(boundaries, amplitudes), delta);
}

}  // namespace

double fd_hessian_diagonal(const ObjectiveSpec& spec, const ControlPulse& pulse,
                           double delta, double t, double window, double h) {
    int segment = -1;
    for (int k = 0; k < pulse.segments(); ++k) {
        if (pulse.boundaries[k] + window / 2.0 < t &&
            t < pulse.boundaries[k + 1] - window / 2.0) {
            segment = k;
            break;
        }
    }
    if (segment < 0) {
        throw std::invalid_argument(
            "fd_hessian_diagonal: t too close to a segment boundary");
    }
    const double lo = t - window / 2.0;
    const double hi = t + window / 2.0;
    const double plus = bumped_objective(spec, pulse, delta, segment, lo, hi, h);
    const double minus =
        bumped_objective(spec, pulse, delta, segment, lo, hi, -h);
    const double base = bumped_objective(spec, pulse, delta, segment, lo, hi, 0.0);
    return (plus + minus - 2.0 * base) / (h * h * window * window);
}

double nonlinear_objective(const TransitionObjective& spec,
                           const Variation& variation, double T, double s,
                           int segments) {
    const double support = variation.support_end();
    Unitary2 u = Unitary2::identity();
    if (support > 0.0) {
        const double step = support / segments;
        for (int k = 0; k < segments; ++k) {
            const double mid = (k + 0.5) * step;
            u = expm_su2(1.0, s * variation(mid), step) * u;
        }
    }
    if (T > support) u = expm_su2(1.0, 0.0, T - support) * u;
    return evaluate(ObjectiveSpec(spec), u);
}

double richardson_dj2(const TransitionObjective& spec,
                      const Variation& variation, double T, double s1,
                      double s2, int segments) {
    const double j0 = nonlinear_objective(spec, variation, T, 0.0, segments);
    const auto estimate = [&](double s) {
        return (nonlinear_objective(spec, variation, T, s, segments) +
                nonlinear_objective(spec, variation, T, -s, segments) -
                2.0 * j0) /
               (2.0 * s * s);
    };
    const double e1 = estimate(s1);
    const double e2 = estimate(s2);
    return (s1 * s1 * e2 - s2 * s2 * e1) / (s1 * s1 - s2 * s2);
}

double n1_landscape_sup(double T, double delta, double A, int grid) {
    double best = 0.0;
    double best_a = 0.0;
    const double step = 2.0 * A / (grid - 1);
    for (int k = 0; k < grid; ++k) {
        const double a = -A + k * step;
        const double j = closed_form_transition(T, delta, a);
        if (j > best) {
            best = j;
            best_a = a;
        }
    }
    // Ternary-search refinement inside the winning cell's neighbourhood.
    double lo = best_a - step;
    double hi = best_a + step;
    for (int iter = 0; iter < 200; ++iter) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (closed_form_transition(T, delta, m1) <
            closed_form_transition(T, delta, m2)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    return std::max(best, closed_form_transition(T, delta, 0.5 * (lo + hi)));
}

double n1_trapped_basin_mass(double T, double delta, double A,
                             double threshold, int grid) {
    // 1-D watershed: basin boundaries are the local minima (and the
    // domain edges); each basin contains exactly one local maximum.
    const double step = 2.0 * A / (grid - 1);
    std::vector<double> j(grid);
    for (int k = 0; k < grid; ++k) {
        j[k] = closed_form_transition(T, delta, -A + k * step);
    }
    double trapped_length = 0.0;
    int basin_start = 0;  // index of the minimum opening the current basin
    double basin_peak = j[0];
    for (int k = 1; k < grid; ++k) {
        const bool is_min =
            k + 1 < grid && j[k] < j[k - 1] && j[k] < j[k + 1];
        if (is_min || k == grid - 1) {
            basin_peak = std::max(basin_peak, j[k]);
            if (basin_peak < threshold) {
                trapped_length += (k - basin_start) * step;
            }
            basin_start = k;
            basin_peak = j[k];
        } else {
            basin_peak = std::max(basin_peak, j[k]);
        }
    }
    return trapped_length / (2.0 * A);
}

namespace {

State2 random_state(SplitMix64& rng) {
    return State2::normalized({rng.normal(), rng.normal()},
                              {rng.normal(), rng.normal()});
}

}  // namespace

RandomCase random_case(SplitMix64& rng) {
    const int kind = static_cast<int>(rng.next() % 3);
    const int n = 1 + static_cast<int>(rng.next() % 12);
    const double T = rng.uniform(0.5, 12.0);
    const double delta = rng.uniform(0.3, 2.0);
    std::vector<double> amps(n);
    for (double& a : amps) a = rng.uniform(-3.0, 3.0);
    ControlPulse pulse = ControlPulse::uniform(T, std::move(amps));

    if (kind == 0) {
        return {TransitionObjective(random_state(rng), random_state(rng)),
                std::move(pulse), delta};
    }
    if (kind == 1) {
        const State2 s = random_state(rng);
        const Complex2x2 obs = Complex2x2::hermitian(
            rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
            {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
        return {ObservableObjective(s.outer(s), obs), std::move(pulse), delta};
    }
    // Random unitary: orthonormal columns with a random relative phase.
    const State2 c0 = random_state(rng);
    const State2 c1 = c0.orthogonal_complement();
    const complexd phase = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));
    const Complex2x2 w(c0.up, phase * c1.up, c0.dn, phase * c1.dn);
    return {GateObjective(Unitary2(w)), std::move(pulse), delta};
}

}  // namespace lz::testing

#include "lz/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lz/parallel.hpp"
#include "lz/rng.hpp"

namespace lz {

NoiseSpec::NoiseSpec(Kind kind_, double sigma_) : kind(kind_), sigma(sigma_) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("NoiseSpec: sigma must be >= 0 and finite");
    }
}

DecreasePrediction predicted_decrease(const ObjectiveSpec& spec,
                                      const PropagationTrace& trace,
                                      const NoiseSpec& noise) {
    // Throws for observable specs, which have no closed-form diagonal.
    const auto diagonal = hessian_diagonal(spec, trace);

    DecreasePrediction out;
    out.energy = trace.pulse.energy();
    out.gradient_sup = gradient(spec, trace).segment_sup();
    out.off_optimum = out.gradient_sup > 1e-6;

    const double s2 = noise.sigma * noise.sigma;
    const bool multiplicative = noise.kind == NoiseSpec::Kind::Multiplicative;

    double integral = 0.0;  // int H0(t,t) rho(t)^2 dt
    std::size_t node = 0;
    for (std::size_t k = 0; k < trace.nodes.size(); ++k) {
        const double a = trace.pulse.amplitudes[k];
        const double rho2 = multiplicative ? a * a : 1.0;
        const auto& seg = trace.nodes[k];
        for (std::size_t j = 0; j < seg.times.size(); ++j, ++node) {
            integral += seg.weights[j] * diagonal[node].second * rho2;
        }
    }

    out.value = -0.5 * s2 * integral;
    out.bound = s2 * (multiplicative ? out.energy : trace.pulse.horizon());
    return out;
}

MonteCarloResult monte_carlo_noisy_objective(const ObjectiveSpec& spec,
                                             const ControlPulse& pulse,
                                             double delta, const NoiseSpec& noise,
                                             int samples, double dt_noise,
                                             std::uint64_t seed, int workers) {
    if (samples < 2) {
        throw std::invalid_argument(
            "monte_carlo_noisy_objective: need at least 2 samples");
    }
    if (!(dt_noise > 0.0)) {
        throw std::invalid_argument(
            "monte_carlo_noisy_objective: dt_noise must be > 0");
    }

    // dt_noise must divide every segment; steps then have exact width
    // duration/steps, which keeps boundaries aligned with the pulse.
    const int n = pulse.segments();
    std::vector<int> steps(n);
    for (int k = 0; k < n; ++k) {
        const double ratio = pulse.duration(k) / dt_noise;
        const int m = static_cast<int>(std::llround(ratio));
        if (m < 1 || std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) {
            throw std::invalid_argument(
                "monte_carlo_noisy_objective: dt_noise must divide every segment");
        }
        steps[k] = m;
    }

    const bool multiplicative = noise.kind == NoiseSpec::Kind::Multiplicative;
    std::vector<double> values(samples);

    run_indexed(samples, workers, [&](int sample) {
        SplitMix64 rng(SplitMix64::derive_seed(seed, sample));
        Unitary2 u = Unitary2::identity();
        for (int k = 0; k < n; ++k) {
            const double a = pulse.amplitudes[k];
            const double h = pulse.duration(k) / steps[k];
            const double stddev = noise.sigma / std::sqrt(h);
            for (int j = 0; j < steps[k]; ++j) {
                const double xi = rng.normal(0.0, stddev);
                const double eps = multiplicative ? a + a * xi : a + xi;
                u = expm_su2(delta, eps, h) * u;
            }
        }
        values[sample] = evaluate(spec, u);
    });

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= samples;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(samples) * (samples - 1);

    MonteCarloResult out;
    out.mean = mean;
    out.standard_error = std::sqrt(var);
    out.samples = samples;
    return out;
}

double qsl_time(const State2& i, const State2& f, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("qsl_time: delta must be positive");
    }
    const double sx_mean =
        std::real(i.inner(pauli(PauliAxis::X) * i));  // <i|sigma_x|i>
    const double variance = 1.0 - sx_mean * sx_mean;  // sigma_x^2 = I
    // States within ~1e-6 of a sigma_x eigenstate have a divergent
    // bound; the threshold also absorbs normalization rounding, which
    // leaves a computed variance of O(1e-16) for exact eigenstates.
    if (variance < 1e-12) {
        throw std::domain_error(
            "qsl_time: |i> is a sigma_x eigenstate, zero energy variance");
    }
    const double de0 = delta * std::sqrt(variance);
    double overlap = std::abs(i.inner(f));
    overlap = std::min(1.0, std::max(0.0, overlap));
    return std::acos(overlap) / de0;
}

}  // namespace lz

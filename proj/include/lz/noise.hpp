#ifndef LZ_NOISE_HPP
#define LZ_NOISE_HPP

#include <cstdint>

#include "lz/dynamics.hpp"
#include "lz/objectives.hpp"

namespace lz {

/// White noise on the control: eps(t) = eps0(t) + rho(t) xi(t) with
/// rho = 1 (additive) or rho = eps0 (multiplicative), and xi
/// delta-correlated with coefficient sigma^2:
/// E[xi(t) xi(t')] = sigma^2 delta(t - t').
struct NoiseSpec {
    enum class Kind { Additive, Multiplicative };
    Kind kind = Kind::Additive;
    double sigma = 0.0;

    NoiseSpec() = default;
    NoiseSpec(Kind kind_, double sigma_);
};

/// Second-order prediction of the noise-induced decrease of the mean
/// objective: D = -(sigma^2/2) int H0(t,t) rho(t)^2 dt, evaluated on
/// the trace's quadrature nodes. Valid at (near-)optimal controls,
/// where the closed-form Hessian diagonal applies; off_optimum is set
/// when the trace's gradient sup-norm exceeds 1e-6.
struct DecreasePrediction {
    double value = 0.0;         // D >= 0
    double bound = 0.0;         // sigma^2 T (additive) or sigma^2 E (multiplicative)
    double energy = 0.0;        // E = int eps0^2 dt
    double gradient_sup = 0.0;  // max_k |dJ/da_k| on the trace
    bool off_optimum = false;
};

DecreasePrediction predicted_decrease(const ObjectiveSpec& spec,
                                      const PropagationTrace& trace,
                                      const NoiseSpec& noise);

struct MonteCarloResult {
    double mean = 0.0;
    double standard_error = 0.0;
    int samples = 0;
};

/// Mean objective under sampled noise realizations. Each realization
/// holds an independent N(0, sigma^2/dt_noise) value on every noise
/// step (the delta-correlation discretization) and perturbs the
/// control additively or multiplicatively; propagation stays exact
/// per step. dt_noise must divide every segment. Deterministic for a
/// given seed regardless of worker count.
MonteCarloResult monte_carlo_noisy_objective(const ObjectiveSpec& spec,
                                             const ControlPulse& pulse,
                                             double delta, const NoiseSpec& noise,
                                             int samples, double dt_noise,
                                             std::uint64_t seed, int workers = 1);

/// Quantum speed limit estimate arccos(|<i|f>|) / dE0 with dE0 the
/// energy variance of the free Hamiltonian delta*sigma_x on |i>.
/// Throws std::domain_error when |i> is a sigma_x eigenstate (dE0=0).
double qsl_time(const State2& i, const State2& f, double delta);

}  // namespace lz

#endif  // LZ_NOISE_HPP

#include "lz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lz/quadrature.hpp"

namespace lz {

namespace {

void check_geometry(const std::vector<double>& boundaries,
                    const std::vector<double>& amplitudes) {
    if (boundaries.size() < 2) {
        throw std::invalid_argument("ControlPulse: need at least one segment");
    }
    if (amplitudes.size() + 1 != boundaries.size()) {
        throw std::invalid_argument(
            "ControlPulse: amplitude count must equal segment count");
    }
    if (boundaries.front() != 0.0) {
        throw std::invalid_argument("ControlPulse: first boundary must be 0");
    }
    for (std::size_t k = 0; k + 1 < boundaries.size(); ++k) {
        if (!(boundaries[k] < boundaries[k + 1])) {
            throw std::invalid_argument(
                "ControlPulse: boundaries must be strictly increasing");
        }
    }
    for (double t : boundaries) {
        if (!std::isfinite(t)) {
            throw std::invalid_argument("ControlPulse: non-finite boundary");
        }
    }
    for (double a : amplitudes) {
        if (!std::isfinite(a)) {
            throw std::invalid_argument("ControlPulse: non-finite amplitude");
        }
    }
}

}  // namespace

ControlPulse::ControlPulse(std::vector<double> boundaries_,
                           std::vector<double> amplitudes_)
    : boundaries(std::move(boundaries_)), amplitudes(std::move(amplitudes_)) {
    check_geometry(boundaries, amplitudes);
}

ControlPulse ControlPulse::uniform(double T, std::vector<double> amplitudes_) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("ControlPulse: horizon must be positive");
    }
    const int n = static_cast<int>(amplitudes_.size());
    if (n < 1) {
        throw std::invalid_argument("ControlPulse: need at least one segment");
    }
    std::vector<double> b(n + 1);
    for (int k = 0; k <= n; ++k) b[k] = T * k / n;
    b[0] = 0.0;
    b[n] = T;
    return ControlPulse(std::move(b), std::move(amplitudes_));
}

ControlPulse ControlPulse::zero(double T, int segments_) {
    if (segments_ < 1) {
        throw std::invalid_argument("ControlPulse: need at least one segment");
    }
    return uniform(T, std::vector<double>(segments_, 0.0));
}

double ControlPulse::amplitude_at(double t) const {
    if (t < boundaries.front() || t > boundaries.back()) {
        throw std::out_of_range("ControlPulse: time outside [0, T]");
    }
    // First boundary strictly greater than t; segment index is one less.
    auto it = std::upper_bound(boundaries.begin(), boundaries.end(), t);
    auto idx = static_cast<std::size_t>(it - boundaries.begin());
    if (idx == boundaries.size()) idx = boundaries.size() - 1;  // t == T
    return amplitudes[idx - 1];
}

double ControlPulse::energy() const {
    double e = 0.0;
    for (int k = 0; k < segments(); ++k) {
        e += amplitudes[k] * amplitudes[k] * duration(k);
    }
    return e;
}

double ControlPulse::sup_norm() const {
    double m = 0.0;
    for (double a : amplitudes) m = std::max(m, std::abs(a));
    return m;
}

ControlPulse ControlPulse::refined(int factor) const {
    if (factor < 1) {
        throw std::invalid_argument("ControlPulse: refine factor must be >= 1");
    }
    std::vector<double> b;
    std::vector<double> a;
    b.reserve(segments() * factor + 1);
    a.reserve(segments() * factor);
    b.push_back(0.0);
    for (int k = 0; k < segments(); ++k) {
        const double t0 = boundaries[k];
        const double t1 = boundaries[k + 1];
        for (int j = 1; j <= factor; ++j) {
            b.push_back(j == factor ? t1 : t0 + (t1 - t0) * j / factor);
            a.push_back(amplitudes[k]);
        }
    }
    return ControlPulse(std::move(b), std::move(a));
}

int PropagationTrace::total_nodes() const {
    int n = 0;
    for (const auto& seg : nodes) n += static_cast<int>(seg.times.size());
    return n;
}

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("propagate: delta must be positive and finite");
    }
}

/// Node count that keeps Gauss-Legendre spectrally accurate for the
/// integrands built on this trace. Matrix elements of V_t oscillate at
/// frequency 2r inside a segment and their squared moduli (Hessian
/// diagonals) at 4r; mapped to [-1,1] that is omega = 2 r tau, and
/// n-point Gauss-Legendre resolves e^{i omega x} once n exceeds
/// ~0.7 omega. Round up and pad.
int nodes_for_segment(int base, double r, double tau) {
    const double omega = 2.0 * r * tau;
    const int need = static_cast<int>(std::ceil(omega)) + 8;
    return std::max(base, need);
}

}  // namespace

PropagationTrace propagate(const ControlPulse& pulse, double delta,
                           int nodes_per_segment) {
    check_geometry(pulse.boundaries, pulse.amplitudes);
    check_delta(delta);
    if (nodes_per_segment < 1) {
        throw std::invalid_argument("propagate: nodes_per_segment must be >= 1");
    }

    PropagationTrace trace;
    trace.pulse = pulse;
    trace.delta = delta;

    const int n = pulse.segments();
    trace.boundary.reserve(n + 1);
    trace.boundary.push_back(Unitary2::identity());
    trace.nodes.resize(n);

    for (int k = 0; k < n; ++k) {
        const double t0 = pulse.boundaries[k];
        const double t1 = pulse.boundaries[k + 1];
        const double a = pulse.amplitudes[k];
        const double tau = t1 - t0;
        const Unitary2& entry = trace.boundary.back();

        const double r = std::hypot(delta, a);
        const int m = nodes_for_segment(nodes_per_segment, r, tau);
        const GaussLegendreRule rule = gauss_legendre_on(m, t0, t1);

        auto& seg = trace.nodes[k];
        seg.times = rule.nodes;
        seg.weights = rule.weights;
        seg.unitaries.reserve(seg.times.size());
        for (double t : seg.times) {
            seg.unitaries.push_back(expm_su2(delta, a, t - t0) * entry);
        }

        trace.boundary.push_back(expm_su2(delta, a, tau) * entry);
    }
    return trace;
}

Unitary2 final_unitary(const ControlPulse& pulse, double delta) {
    check_geometry(pulse.boundaries, pulse.amplitudes);
    check_delta(delta);
    Unitary2 u = Unitary2::identity();
    for (int k = 0; k < pulse.segments(); ++k) {
        u = expm_su2(delta, pulse.amplitudes[k], pulse.duration(k)) * u;
    }
    return u;
}

State2 evolve_state(const PropagationTrace& trace, const State2& psi0) {
    return trace.final_unitary() * psi0;
}

std::vector<std::pair<double, Complex2x2>> sample_V(const PropagationTrace& trace) {
    std::vector<std::pair<double, Complex2x2>> out;
    out.reserve(trace.total_nodes());
    const Complex2x2 sz = pauli(PauliAxis::Z);
    for (const auto& seg : trace.nodes) {
        for (std::size_t j = 0; j < seg.times.size(); ++j) {
            out.emplace_back(seg.times[j], conjugate_by(seg.unitaries[j], sz));
        }
    }
    return out;
}

}  // namespace lz

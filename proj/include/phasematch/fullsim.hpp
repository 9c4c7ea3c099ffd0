// fullsim.hpp
// N-dimensional statevector simulation of -F I_0^psi F I_target^phi, used as
// the brute-force reference for the reduced 2x2 model.

#pragma once

#include "phasematch/core.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasematch {

class StateVector {
public:
    explicit StateVector(unsigned qubits) : qubits_(qubits), amps_(std::size_t{1} << qubits) {
        if (qubits < 1 || qubits > 30) throw std::invalid_argument("StateVector: qubit count must be in [1, 30]");
        amps_[0] = 1.0;
    }

    StateVector(unsigned qubits, std::vector<cplx> amplitudes) : qubits_(qubits), amps_(std::move(amplitudes)) {
        if (amps_.size() != (std::size_t{1} << qubits))
            throw std::invalid_argument("StateVector: amplitude count must be 2^n");
    }

    static StateVector basis(unsigned qubits, std::size_t index) {
        StateVector s(qubits);
        s.amps_[0] = 0.0;
        s.amps_.at(index) = 1.0;
        return s;
    }

    static StateVector uniform(unsigned qubits) {
        StateVector s(qubits);
        const double a = 1.0 / std::sqrt(static_cast<double>(s.size()));
        std::fill(s.amps_.begin(), s.amps_.end(), cplx(a, 0.0));
        return s;
    }

    unsigned qubits() const noexcept { return qubits_; }
    std::size_t size() const noexcept { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const noexcept { return amps_; }
    std::vector<cplx>& amplitudes() noexcept { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    cplx& operator[](std::size_t i) { return amps_[i]; }

    double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

private:
    unsigned qubits_;
    std::vector<cplx> amps_;
};

/// In-place fast Walsh-Hadamard transform, F_ij = 2^{-n/2} (-1)^{i.j}.
inline void walsh_hadamard_inplace(StateVector& state) noexcept {
    auto& a = state.amplitudes();
    const std::size_t n = a.size();
    for (std::size_t half = 1; half < n; half <<= 1) {
        for (std::size_t block = 0; block < n; block += 2 * half) {
            for (std::size_t k = block; k < block + half; ++k) {
                const cplx x = a[k];
                const cplx y = a[k + half];
                a[k] = x + y;
                a[k + half] = x - y;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : a) v *= scale;
}

inline StateVector walsh_hadamard(StateVector state) {
    walsh_hadamard_inplace(state);
    return state;
}

inline void phase_oracle_inplace(StateVector& state, std::size_t index, double angle) {
    if (index >= state.size()) throw std::out_of_range("phase_oracle: index out of range");
    state[index] *= std::polar(1.0, angle);
}

inline StateVector phase_oracle(StateVector state, std::size_t index, double angle) {
    phase_oracle_inplace(state, index, angle);
    return state;
}

/// I_target^phi, then F, then I_0^psi, then F, then the global -1.
inline void full_iterate_inplace(StateVector& state, const PhasePair& phases, std::size_t target) {
    phase_oracle_inplace(state, target, phases.phi);
    walsh_hadamard_inplace(state);
    phase_oracle_inplace(state, 0, phases.psi);
    walsh_hadamard_inplace(state);
    for (auto& v : state.amplitudes()) v = -v;
}

inline StateVector full_iterate(StateVector state, const PhasePair& phases, std::size_t target) {
    full_iterate_inplace(state, phases, target);
    return state;
}

struct SymmetryError : std::runtime_error {
    double deviation;
    explicit SymmetryError(double dev)
        : std::runtime_error("reduce: non-target amplitudes differ by " + std::to_string(dev) +
                             "; state left the two-dimensional subspace"),
          deviation(dev) {}
};

/// Projects onto {|target>, |a>}: returns (a_target, sqrt(N-1) * a_common).
/// Throws SymmetryError when the non-target amplitudes are not all equal.
inline ComplexPair reduce(const StateVector& state, std::size_t target, double tolerance = 1e-10) {
    if (target >= state.size()) throw std::out_of_range("reduce: target out of range");
    const std::size_t n = state.size();
    const std::size_t ref = target == 0 ? 1 : 0;
    const cplx common = state[ref];
    double worst = 0.0;
    cplx sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == target) continue;
        worst = std::max(worst, std::abs(state[i] - common));
        sum += state[i];
    }
    if (worst > tolerance) throw SymmetryError(worst);
    const double rest = static_cast<double>(n - 1);
    return {state[target], sum / rest * std::sqrt(rest)};
}

struct EquivalenceCase {
    std::size_t target = 0;
    std::vector<PhasePair> phases;
    double deviation = 0.0;
};

struct EquivalenceReport {
    unsigned qubits = 0;
    int cases = 0;
    int steps = 0;
    double max_deviation = 0.0;              // entrywise, over all cases and steps
    double max_probability_deviation = 0.0;
    EquivalenceCase worst;
};

/// Random phase sequences from the uniform start: compares the full
/// trajectory, reduced after every step, against the raw 2x2 product.
inline EquivalenceReport check_equivalence(unsigned qubits, int cases, int steps, std::uint64_t seed) {
    if (cases < 1 || steps < 0) throw std::invalid_argument("check_equivalence: need cases >= 1, steps >= 0");
    const SearchSpace space(qubits);
    std::mt19937_64 rng(seed ^ (0x51ED270B27A4F0C1ull * qubits));
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_int_distribution<std::uint64_t> pick(0, space.size() - 1);

    EquivalenceReport rep;
    rep.qubits = qubits;
    rep.cases = cases;
    rep.steps = steps;

    for (int c = 0; c < cases; ++c) {
        EquivalenceCase cs;
        cs.target = static_cast<std::size_t>(pick(rng));
        for (int s = 0; s < steps; ++s) cs.phases.emplace_back(angle(rng), angle(rng));

        const SearchSpace targeted(qubits, cs.target);
        StateVector full = StateVector::uniform(qubits);
        ComplexPair small = hadamard_init(targeted).to_pair();
        for (const PhasePair& p : cs.phases) {
            full_iterate_inplace(full, p, cs.target);
            small = apply_iterate_raw(small, p, targeted);
            const ComplexPair reduced = reduce(full, cs.target);
            cs.deviation = std::max({cs.deviation, std::abs(reduced.a_target - small.a_target),
                                     std::abs(reduced.a_rest - small.a_rest)});
            rep.max_probability_deviation =
                std::max(rep.max_probability_deviation,
                         std::abs(reduced.target_probability() - small.target_probability()));
        }
        if (c == 0 || cs.deviation > rep.worst.deviation) rep.worst = cs;
        rep.max_deviation = std::max(rep.max_deviation, cs.deviation);
    }
    return rep;
}

} // namespace phasematch

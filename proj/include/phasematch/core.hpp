// core.hpp
// Reduced two-dimensional dynamics of the generalized Grover iterate.
//
// The N-dimensional search state is pooled into the basis {|target>, |a>},
// where |a> is the normalized uniform superposition of every non-target
// element. In that basis one application of -F I_0^psi F I_target^phi is a
// 2x2 unitary, and the state is described by two real numbers:
//
//     v = [ e^{i theta} sin(alpha), cos(alpha) ]^T
//
// alpha carries the target probability (sin^2 alpha) and theta is the phase
// of the target amplitude relative to the pooled non-target amplitude.

#pragma once

#include "phasematch/angles.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace phasematch {

using cplx = std::complex<double>;

/// Search space of N = 2^n elements with one marked target index.
class SearchSpace {
public:
    static constexpr unsigned kMaxQubits = 62;

    explicit SearchSpace(unsigned qubits, std::uint64_t target = 0)
        : qubits_(qubits), target_(target) {
        if (qubits < 1 || qubits > kMaxQubits)
            throw std::invalid_argument("SearchSpace: qubit count must be in [1, 62], got " +
                                        std::to_string(qubits));
        if (target >= size())
            throw std::invalid_argument("SearchSpace: target " + std::to_string(target) +
                                        " out of range for N = " + std::to_string(size()));
    }

    /// Builds from the set size; N must be a power of two >= 2.
    static SearchSpace from_size(std::uint64_t set_size, std::uint64_t target = 0) {
        if (set_size < 2 || (set_size & (set_size - 1)) != 0)
            throw std::invalid_argument("SearchSpace: set size must be a power of two >= 2, got " +
                                        std::to_string(set_size));
        unsigned n = 0;
        while ((std::uint64_t{1} << n) != set_size) ++n;
        return SearchSpace(n, target);
    }

    unsigned qubits() const noexcept { return qubits_; }
    std::uint64_t size() const noexcept { return std::uint64_t{1} << qubits_; }
    double size_real() const noexcept { return static_cast<double>(size()); }
    std::uint64_t target() const noexcept { return target_; }

    friend bool operator==(const SearchSpace&, const SearchSpace&) = default;

private:
    unsigned qubits_;
    std::uint64_t target_;
};

/// Materialized amplitudes in the {|target>, |a>} basis.
struct ComplexPair {
    cplx a_target;
    cplx a_rest;

    double norm_squared() const noexcept { return std::norm(a_target) + std::norm(a_rest); }
    double target_probability() const noexcept { return std::norm(a_target); }
};

/// Diffusion phase psi (applied to |0> between the transforms) and oracle
/// phase phi (applied to the target). Both stored in (-pi, pi].
struct PhasePair {
    double psi = kPi;
    double phi = kPi;

    PhasePair() = default;
    PhasePair(double psi_, double phi_) : psi(wrap_angle(psi_)), phi(wrap_angle(phi_)) {}

    static PhasePair classical() { return {kPi, kPi}; }

    /// The (-psi, -phi) twin; the objective is invariant under negation.
    PhasePair negated() const { return {-psi, -phi}; }

    friend bool operator==(const PhasePair&, const PhasePair&) = default;
};

/// Canonical state form: alpha in [0, pi/2], theta in (-pi, pi].
class ReducedState {
public:
    ReducedState() = default;

    ReducedState(double alpha, double theta) : alpha_(alpha), theta_(wrap_angle(theta)) {
        if (!(alpha >= 0.0 && alpha <= kPi / 2))
            throw std::invalid_argument("ReducedState: alpha must lie in [0, pi/2]");
    }

    /// Canonicalizes an arbitrary amplitude pair: the global phase is divided
    /// out so the pooled amplitude is real and non-negative. theta is 0 when
    /// either amplitude vanishes (it carries no information there).
    static ReducedState from_pair(const ComplexPair& v) {
        const double mt = std::abs(v.a_target);
        const double mr = std::abs(v.a_rest);
        const double alpha = std::atan2(mt, mr);
        const double theta = (mt == 0.0 || mr == 0.0) ? 0.0 : std::arg(v.a_target) - std::arg(v.a_rest);
        return ReducedState(alpha, theta);
    }

    double alpha() const noexcept { return alpha_; }
    double theta() const noexcept { return theta_; }

    ComplexPair to_pair() const {
        return {std::polar(std::sin(alpha_), theta_), cplx(std::cos(alpha_), 0.0)};
    }

private:
    double alpha_ = 0.0;
    double theta_ = 0.0;
};

/// 2x2 complex matrix acting on (a_target, a_rest).
struct IterateMatrix {
    std::array<cplx, 4> m{};  // row-major

    cplx& operator()(int r, int c) noexcept { return m[static_cast<std::size_t>(2 * r + c)]; }
    const cplx& operator()(int r, int c) const noexcept { return m[static_cast<std::size_t>(2 * r + c)]; }

    ComplexPair apply(const ComplexPair& v) const noexcept {
        return {(*this)(0, 0) * v.a_target + (*this)(0, 1) * v.a_rest,
                (*this)(1, 0) * v.a_target + (*this)(1, 1) * v.a_rest};
    }

    IterateMatrix adjoint() const noexcept {
        IterateMatrix out;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) out(r, c) = std::conj((*this)(c, r));
        return out;
    }

    friend IterateMatrix operator*(const IterateMatrix& a, const IterateMatrix& b) noexcept {
        IterateMatrix out;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c);
        return out;
    }

    /// max |(U^dagger U - I)_{rc}|
    double unitarity_error() const noexcept {
        const IterateMatrix p = adjoint() * *this;
        double err = 0.0;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                err = std::max(err, std::abs(p(r, c) - cplx(r == c ? 1.0 : 0.0, 0.0)));
        return err;
    }
};

/// Uniform superposition: sin(alpha) = 1/sqrt(N), theta = 0.
inline ReducedState hadamard_init(const SearchSpace& space) {
    return ReducedState(std::asin(1.0 / std::sqrt(space.size_real())), 0.0);
}

/// Reduced form of -F I_0^psi F I_target^phi:
///
///   [ e^{i phi}((1 - e^{i psi})/N - 1)       sqrt(N-1)/N (1 - e^{i psi})   ]
///   [ sqrt(N-1)/N e^{i phi}(1 - e^{i psi})   -(1/N + (1 - 1/N) e^{i psi})  ]
inline IterateMatrix iterate_matrix(const PhasePair& phases, const SearchSpace& space) {
    const double n = space.size_real();
    const double root = std::sqrt(n - 1.0) / n;
    const cplx e_psi = std::polar(1.0, phases.psi);
    const cplx e_phi = std::polar(1.0, phases.phi);
    const cplx one_minus = 1.0 - e_psi;

    IterateMatrix a;
    a(0, 0) = e_phi * (one_minus / n - 1.0);
    a(0, 1) = root * one_minus;
    a(1, 0) = root * e_phi * one_minus;
    a(1, 1) = -(1.0 / n + (1.0 - 1.0 / n) * e_psi);
    return a;
}

/// Raw matrix product A^{psi,phi} v with no phase canonicalization.
inline ComplexPair apply_iterate_raw(const ComplexPair& v, const PhasePair& phases, const SearchSpace& space) {
    return iterate_matrix(phases, space).apply(v);
}

inline ReducedState apply_iterate(const ReducedState& state, const PhasePair& phases, const SearchSpace& space) {
    return ReducedState::from_pair(apply_iterate_raw(state.to_pair(), phases, space));
}

inline double target_probability(const ReducedState& state) noexcept {
    const double s = std::sin(state.alpha());
    return s * s;
}

/// Target probability after one iterate, evaluated directly from the first
/// row of A^{psi,phi}. The state's theta is absorbed into the oracle phase
/// (phi* = phi + theta), so a real state with phi* gives the same value.
inline double one_step_probability(const ReducedState& state, const PhasePair& phases, const SearchSpace& space) {
    const double n = space.size_real();
    const double phi_star = phases.phi + state.theta();
    const cplx one_minus = 1.0 - std::polar(1.0, phases.psi);
    const cplx f = std::polar(1.0, phi_star) * (one_minus / n - 1.0) * std::sin(state.alpha()) +
                   std::sqrt(n - 1.0) / n * one_minus * std::cos(state.alpha());
    return std::norm(f);
}

} // namespace phasematch

// objective.hpp
// Closed-form one-step objective for the two-phase iterate.
//
// For a real state (theta absorbed into phi) the post-step target
// probability splits into a phase-independent part c and a phase-dependent
// part g = G / N^2, where
//
//   G(psi, phi) = (N-1)^{3/2} sin 2a (cos(phi - psi) - cos phi)
//               - 2 (N-1) cos 2a cos psi
//               - (N-1)^{1/2} sin 2a (cos(phi + psi) - cos phi)
//
// Maximizing G over the torus yields the optimal phase pair.

#pragma once

#include "phasematch/core.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace phasematch {

/// Parameters the objective is conditioned on: the state's alpha and N.
class ObjectiveContext {
public:
    ObjectiveContext(double alpha, std::uint64_t set_size) : alpha_(alpha), set_size_(set_size) {
        if (!(alpha >= 0.0 && alpha <= kPi / 2))
            throw std::invalid_argument("ObjectiveContext: alpha must lie in [0, pi/2]");
        if (set_size < 2) throw std::invalid_argument("ObjectiveContext: N must be >= 2");
        const double m = static_cast<double>(set_size) - 1.0;
        const double s2 = std::sin(2.0 * alpha);
        const double c2 = std::cos(2.0 * alpha);
        lead_ = std::pow(m, 1.5) * s2;
        diffusion_ = 2.0 * m * c2;
        cross_ = std::sqrt(m) * s2;
    }

    ObjectiveContext(const ReducedState& state, const SearchSpace& space)
        : ObjectiveContext(state.alpha(), space.size()) {}

    double alpha() const noexcept { return alpha_; }
    std::uint64_t set_size() const noexcept { return set_size_; }
    double set_size_real() const noexcept { return static_cast<double>(set_size_); }

    // Coefficients of G: lead*(cos(phi-psi) - cos phi) - diffusion*cos psi - cross*(cos(phi+psi) - cos phi)
    double lead() const noexcept { return lead_; }
    double diffusion() const noexcept { return diffusion_; }
    double cross() const noexcept { return cross_; }

    /// True when sin 2a vanishes and phi drops out of the objective.
    bool phi_degenerate() const noexcept { return std::abs(std::sin(2.0 * alpha_)) < 1e-12; }

private:
    double alpha_;
    std::uint64_t set_size_;
    double lead_ = 0.0;
    double diffusion_ = 0.0;
    double cross_ = 0.0;
};

struct Decomposition {
    double c = 0.0;
    double g = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double f3 = 0.0;

    double probability() const noexcept { return c + g; }
};

struct Gradient {
    double d_psi = 0.0;
    double d_phi = 0.0;

    double max_abs() const noexcept { return std::max(std::abs(d_psi), std::abs(d_phi)); }
};

/// Second derivatives of G in (psi, phi) order.
struct Hessian2 {
    double psi_psi = 0.0;
    double psi_phi = 0.0;
    double phi_phi = 0.0;

    double determinant() const noexcept { return psi_psi * phi_phi - psi_phi * psi_phi; }
};

inline double objective_G(const ObjectiveContext& ctx, const PhasePair& p) noexcept {
    const double cphi = std::cos(p.phi);
    return ctx.lead() * (std::cos(p.phi - p.psi) - cphi) - ctx.diffusion() * std::cos(p.psi) -
           ctx.cross() * (std::cos(p.phi + p.psi) - cphi);
}

// Unwrapped evaluation for the optimizer, which walks freely on R^2.
inline double objective_G(const ObjectiveContext& ctx, double psi, double phi) noexcept {
    const double cphi = std::cos(phi);
    return ctx.lead() * (std::cos(phi - psi) - cphi) - ctx.diffusion() * std::cos(psi) -
           ctx.cross() * (std::cos(phi + psi) - cphi);
}

inline Decomposition decompose_probability(const ObjectiveContext& ctx, const PhasePair& p) noexcept {
    const double n = ctx.set_size_real();
    const double m = n - 1.0;
    const double sa = std::sin(ctx.alpha());
    const double cpsi = std::cos(p.psi);
    const double cphi = std::cos(p.phi);

    Decomposition d;
    d.c = ((n - 2.0) * (n - 2.0) * sa * sa + 2.0 * m) / (n * n);
    d.g = objective_G(ctx, p) / (n * n);
    d.f1 = m * m + 1.0 + 2.0 * m * cpsi;
    d.f2 = 2.0 * (1.0 - cpsi);
    d.f3 = m * (std::cos(p.phi - p.psi) - cphi) - (std::cos(p.phi + p.psi) - cphi);
    return d;
}

/// c + G/N^2; the target probability after one step from a real state.
inline double objective_probability(const ObjectiveContext& ctx, const PhasePair& p) noexcept {
    return decompose_probability(ctx, p).probability();
}

inline Gradient objective_gradient(const ObjectiveContext& ctx, double psi, double phi) noexcept {
    const double s_diff = std::sin(phi - psi);
    const double s_sum = std::sin(phi + psi);
    const double sphi = std::sin(phi);
    return {ctx.lead() * s_diff + ctx.diffusion() * std::sin(psi) + ctx.cross() * s_sum,
            ctx.lead() * (sphi - s_diff) - ctx.cross() * (sphi - s_sum)};
}

inline Gradient objective_gradient(const ObjectiveContext& ctx, const PhasePair& p) noexcept {
    return objective_gradient(ctx, p.psi, p.phi);
}

inline Hessian2 objective_hessian(const ObjectiveContext& ctx, double psi, double phi) noexcept {
    const double c_diff = std::cos(phi - psi);
    const double c_sum = std::cos(phi + psi);
    const double cphi = std::cos(phi);
    return {-ctx.lead() * c_diff + ctx.diffusion() * std::cos(psi) + ctx.cross() * c_sum,
            ctx.lead() * c_diff + ctx.cross() * c_sum,
            ctx.lead() * (cphi - c_diff) - ctx.cross() * (cphi - c_sum)};
}

/// Single-phase objective from earlier work (psi = phi, complex state):
///
///   (sqrt(N-1)/N cos 2a + 1/N sin 2a cos(phi + theta)) (1 - cos phi)
///     - 1/2 sin 2a cos(phi + theta)
///
/// Kept for comparison only; at theta = 0 its argmax agrees with the
/// diagonal psi = phi of G.
inline double legacy_single_phase_objective(const ObjectiveContext& ctx, double theta, double phi) noexcept {
    const double n = ctx.set_size_real();
    const double s2 = std::sin(2.0 * ctx.alpha());
    const double c2 = std::cos(2.0 * ctx.alpha());
    const double shifted = std::cos(phi + theta);
    return (std::sqrt(n - 1.0) / n * c2 + s2 / n * shifted) * (1.0 - std::cos(phi)) - 0.5 * s2 * shifted;
}

} // namespace phasematch

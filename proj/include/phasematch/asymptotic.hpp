// asymptotic.hpp
// Leading-term analysis of the objective for large N.
//
// Hadamard start, first step: the dominant part of G is proportional to
//     h(phi, psi) = cos(phi - psi) - cos phi - cos psi
// Probability of order f(N)/N: the dominant part is
//     g(phi, psi) = cos(phi - psi) - cos phi
//
// Both take (phi, psi) in that order, and their Hessians are indexed the
// same way: [[d2/dphi2, d2/dphi dpsi], [., d2/dpsi2]].

#pragma once

#include "phasematch/optimizer.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace phasematch {

using Matrix2 = std::array<std::array<double, 2>, 2>;

enum class CriticalKind { local_max, local_min, saddle };

inline std::string_view to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::local_max: return "local_max";
        case CriticalKind::local_min: return "local_min";
        case CriticalKind::saddle: return "saddle";
    }
    return "unknown";
}

enum class LeadingTerm { h, g };

inline std::string_view to_string(LeadingTerm t) { return t == LeadingTerm::h ? "h" : "g"; }

struct CriticalPoint {
    LeadingTerm term = LeadingTerm::h;
    int phi_thirds = 0;  // phi = phi_thirds * pi/3, wrapped into (-pi, pi]
    int psi_thirds = 0;
    double phi = 0.0;
    double psi = 0.0;
    Matrix2 hessian{};
    CriticalKind kind = CriticalKind::saddle;
};

inline double leading_h(double phi, double psi) noexcept {
    return std::cos(phi - psi) - std::cos(phi) - std::cos(psi);
}

inline double leading_g(double phi, double psi) noexcept { return std::cos(phi - psi) - std::cos(phi); }

/// (dh/dphi, dh/dpsi)
inline std::array<double, 2> gradient_h(double phi, double psi) noexcept {
    return {-std::sin(phi - psi) + std::sin(phi), std::sin(phi - psi) + std::sin(psi)};
}

inline std::array<double, 2> gradient_g(double phi, double psi) noexcept {
    return {-std::sin(phi - psi) + std::sin(phi), std::sin(phi - psi)};
}

inline Matrix2 hessian_h(double phi, double psi) noexcept {
    const double c = std::cos(phi - psi);
    return {{{-c + std::cos(phi), c}, {c, -c + std::cos(psi)}}};
}

inline Matrix2 hessian_g(double phi, double psi) noexcept {
    const double c = std::cos(phi - psi);
    return {{{-c + std::cos(phi), c}, {c, -c}}};
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline std::array<double, 2> symmetric_eigenvalues(const Matrix2& m) noexcept {
    const double mean = 0.5 * (m[0][0] + m[1][1]);
    const double half_gap = 0.5 * (m[0][0] - m[1][1]);
    const double radius = std::hypot(half_gap, m[0][1]);
    return {mean - radius, mean + radius};
}

/// Second-derivative test. Throws on a singular Hessian, where the test
/// says nothing.
inline CriticalKind classify(const Matrix2& hessian) {
    const auto ev = symmetric_eigenvalues(hessian);
    if (ev[0] == 0.0 || ev[1] == 0.0) throw std::domain_error("classify: singular Hessian");
    if (ev[1] < 0.0) return CriticalKind::local_max;
    if (ev[0] > 0.0) return CriticalKind::local_min;
    return CriticalKind::saddle;
}

namespace detail {

// cos(k pi / 3), exact in binary floating point.
inline double cos_thirds(int k) noexcept {
    static constexpr std::array<double, 6> table{1.0, 0.5, -0.5, -1.0, -0.5, 0.5};
    return table[static_cast<std::size_t>(((k % 6) + 6) % 6)];
}

inline double angle_from_thirds(int k) noexcept { return wrap_angle(static_cast<double>(k) * kPi / 3.0); }

inline CriticalPoint exact_point(LeadingTerm term, int phi_k, int psi_k) {
    CriticalPoint cp;
    cp.term = term;
    cp.phi_thirds = phi_k;
    cp.psi_thirds = psi_k;
    cp.phi = angle_from_thirds(phi_k);
    cp.psi = angle_from_thirds(psi_k);
    const double c = cos_thirds(phi_k - psi_k);
    const double last = term == LeadingTerm::h ? -c + cos_thirds(psi_k) : -c;
    cp.hessian = {{{-c + cos_thirds(phi_k), c}, {c, last}}};
    cp.kind = classify(cp.hessian);
    return cp;
}

} // namespace detail

/// The six critical points of h on the torus: sin phi = 0 gives the four
/// points on {0, pi}^2, and cos phi + cos psi = 1 with sin psi = -sin phi
/// gives (pi/3, -pi/3) and (-pi/3, pi/3).
inline std::vector<CriticalPoint> critical_points_h() {
    using detail::exact_point;
    return {exact_point(LeadingTerm::h, 0, 0),  exact_point(LeadingTerm::h, 0, 3),
            exact_point(LeadingTerm::h, 3, 0),  exact_point(LeadingTerm::h, 3, 3),
            exact_point(LeadingTerm::h, 1, -1), exact_point(LeadingTerm::h, -1, 1)};
}

/// The four critical points of g, all on {0, pi}^2.
inline std::vector<CriticalPoint> critical_points_g() {
    using detail::exact_point;
    return {exact_point(LeadingTerm::g, 0, 0), exact_point(LeadingTerm::g, 0, 3), exact_point(LeadingTerm::g, 3, 0),
            exact_point(LeadingTerm::g, 3, 3)};
}

enum class ConvergenceRegime { hadamard_first_step, order_fN_over_N };

struct ConvergencePoint {
    std::uint64_t set_size = 0;
    double alpha = 0.0;
    PhasePair optimum;
    double distance = 0.0;  // Euclidean distance on the torus from (pi, pi)
};

inline double distance_from_classical(const PhasePair& p) noexcept {
    return std::hypot(angular_distance(p.psi, kPi), angular_distance(p.phi, kPi));
}

/// Runs the full optimizer at each N under the given regime and measures how
/// far the optimum sits from (pi, pi). For order_fN_over_N the target
/// probability is f(N)/N, which must lie in (0, 1).
inline std::vector<ConvergencePoint> convergence_check(const std::vector<std::uint64_t>& sizes,
                                                       ConvergenceRegime regime,
                                                       const std::function<double(double)>& growth = {},
                                                       const OptimizerConfig& cfg = {}) {
    std::vector<ConvergencePoint> out;
    out.reserve(sizes.size());
    for (std::uint64_t n : sizes) {
        const SearchSpace space = SearchSpace::from_size(n);
        double alpha = 0.0;
        if (regime == ConvergenceRegime::hadamard_first_step) {
            alpha = hadamard_init(space).alpha();
        } else {
            if (!growth) throw std::invalid_argument("convergence_check: growth function required");
            const double p = growth(static_cast<double>(n)) / static_cast<double>(n);
            if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("convergence_check: f(N)/N must lie in (0, 1)");
            alpha = std::asin(std::sqrt(p));
        }
        const OptimizationResult r = optimize_phases(ObjectiveContext(alpha, n), cfg);
        out.push_back({n, alpha, r.best, distance_from_classical(r.best)});
    }
    return out;
}

/// (2(N-1)^2 / N) h(phi, psi): the order-N part of G at the Hadamard start.
inline double hadamard_leading_approximation(std::uint64_t set_size, double phi, double psi) noexcept {
    const double n = static_cast<double>(set_size);
    return 2.0 * (n - 1.0) * (n - 1.0) / n * leading_h(phi, psi);
}

} // namespace phasematch

#include "phasematch/asymptotic.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace phasematch;

namespace {

Matrix2 m(double a, double b, double c, double d) { return {{{a, b}, {c, d}}}; }

const CriticalPoint& find(const std::vector<CriticalPoint>& pts, int phi_k, int psi_k) {
    for (const auto& p : pts)
        if (p.phi_thirds == phi_k && p.psi_thirds == psi_k) return p;
    throw std::runtime_error("critical point not found");
}

std::map<CriticalKind, int> count_kinds(const std::vector<CriticalPoint>& pts) {
    std::map<CriticalKind, int> out;
    for (const auto& p : pts) ++out[p.kind];
    return out;
}

} // namespace

TEST(LeadingTerms, Values) {
    EXPECT_DOUBLE_EQ(leading_h(kPi, kPi), 3.0);
    EXPECT_DOUBLE_EQ(leading_h(0.0, 0.0), -1.0);
    EXPECT_NEAR(leading_h(kPi / 3, -kPi / 3), -1.5, 1e-15);
    EXPECT_DOUBLE_EQ(leading_g(kPi, kPi), 2.0);
    EXPECT_DOUBLE_EQ(leading_g(0.0, kPi), -2.0);
    EXPECT_DOUBLE_EQ(leading_g(kPi, 0.0), 0.0);
}

TEST(CriticalPointsH, HessiansAndKinds) {
    const auto pts = critical_points_h();
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_EQ(find(pts, 0, 0).hessian, m(0, 1, 1, 0));
    EXPECT_EQ(find(pts, 0, 3).hessian, m(2, -1, -1, 0));
    EXPECT_EQ(find(pts, 3, 0).hessian, m(0, -1, -1, 2));
    EXPECT_EQ(find(pts, 3, 3).hessian, m(-2, 1, 1, -2));
    EXPECT_EQ(find(pts, 1, -1).hessian, m(1, -0.5, -0.5, 1));
    EXPECT_EQ(find(pts, -1, 1).hessian, m(1, -0.5, -0.5, 1));

    EXPECT_EQ(find(pts, 3, 3).kind, CriticalKind::local_max);
    EXPECT_EQ(find(pts, 1, -1).kind, CriticalKind::local_min);
    EXPECT_EQ(find(pts, -1, 1).kind, CriticalKind::local_min);
    for (auto [a, b] : {std::pair{0, 0}, {0, 3}, {3, 0}}) EXPECT_EQ(find(pts, a, b).kind, CriticalKind::saddle);

    // 5pi/3 is stored wrapped
    EXPECT_NEAR(find(pts, 1, -1).psi, -kPi / 3, 1e-15);
    EXPECT_EQ(find(pts, 3, 3).phi, kPi);
}

TEST(CriticalPointsG, HessiansAndKinds) {
    const auto pts = critical_points_g();
    ASSERT_EQ(pts.size(), 4u);
    EXPECT_EQ(find(pts, 0, 0).hessian, m(0, 1, 1, -1));
    EXPECT_EQ(find(pts, 0, 3).hessian, m(2, -1, -1, 1));
    EXPECT_EQ(find(pts, 3, 0).hessian, m(0, -1, -1, 1));
    EXPECT_EQ(find(pts, 3, 3).hessian, m(-2, 1, 1, -1));
    const auto kinds = count_kinds(pts);
    EXPECT_EQ(kinds.at(CriticalKind::saddle), 2);
    EXPECT_EQ(kinds.at(CriticalKind::local_min), 1);
    EXPECT_EQ(kinds.at(CriticalKind::local_max), 1);
    EXPECT_EQ(find(pts, 0, 3).kind, CriticalKind::local_min);
}

TEST(CriticalPoints, GradientVanishesAndHessiansAgreeWithClosedForm) {
    for (const auto& p : critical_points_h()) {
        const auto g = gradient_h(p.phi, p.psi);
        EXPECT_LT(std::abs(g[0]), 1e-12);
        EXPECT_LT(std::abs(g[1]), 1e-12);
        const Matrix2 numeric = hessian_h(p.phi, p.psi);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) EXPECT_NEAR(numeric[r][c], p.hessian[r][c], 1e-15);
    }
    for (const auto& p : critical_points_g()) {
        const auto g = gradient_g(p.phi, p.psi);
        EXPECT_LT(std::abs(g[0]), 1e-12);
        EXPECT_LT(std::abs(g[1]), 1e-12);
        const Matrix2 numeric = hessian_g(p.phi, p.psi);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) EXPECT_NEAR(numeric[r][c], p.hessian[r][c], 1e-15);
    }
}

TEST(CriticalPoints, HessianMatchesSecondDifferences) {
    const double h = 1e-4;
    for (const auto& p : critical_points_h()) {
        const double fpp = (leading_h(p.phi + h, p.psi) - 2 * leading_h(p.phi, p.psi) + leading_h(p.phi - h, p.psi)) / (h * h);
        const double fss = (leading_h(p.phi, p.psi + h) - 2 * leading_h(p.phi, p.psi) + leading_h(p.phi, p.psi - h)) / (h * h);
        EXPECT_NEAR(fpp, p.hessian[0][0], 1e-6);
        EXPECT_NEAR(fss, p.hessian[1][1], 1e-6);
    }
}

TEST(Classify, SecondDerivativeTest) {
    EXPECT_EQ(classify(m(-2, 1, 1, -2)), CriticalKind::local_max);
    EXPECT_EQ(classify(m(1, -0.5, -0.5, 1)), CriticalKind::local_min);
    EXPECT_EQ(classify(m(0, 1, 1, 0)), CriticalKind::saddle);
    EXPECT_THROW(classify(m(1, 1, 1, 1)), std::domain_error);
}

TEST(LeadingTerms, GlobalLatticeMaximumAtClassicalPhases) {
    const int grid = 721;
    double best_h = -1e300, best_g = -1e300;
    double h_at[2] = {0, 0}, g_at[2] = {0, 0};
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double phi = -kPi + kTwoPi * i / (grid - 1);
            const double psi = -kPi + kTwoPi * j / (grid - 1);
            if (leading_h(phi, psi) > best_h) best_h = leading_h(phi, psi), h_at[0] = phi, h_at[1] = psi;
            if (leading_g(phi, psi) > best_g) best_g = leading_g(phi, psi), g_at[0] = phi, g_at[1] = psi;
        }
    EXPECT_NEAR(best_h, 3.0, 1e-12);
    EXPECT_NEAR(best_g, 2.0, 1e-12);
    EXPECT_NEAR(angular_distance(h_at[0], kPi) + angular_distance(h_at[1], kPi), 0.0, 1e-12);
    EXPECT_NEAR(angular_distance(g_at[0], kPi) + angular_distance(g_at[1], kPi), 0.0, 1e-12);
}

TEST(LeadingTerms, LargeNRanksClassicalPointFirst) {
    for (unsigned n = 10; n <= 16; ++n) {
        const std::uint64_t size = std::uint64_t{1} << n;
        const ObjectiveContext ctx(hadamard_init(SearchSpace(n)).alpha(), size);
        const auto pts = critical_points_h();
        const CriticalPoint& top = find(pts, 3, 3);
        for (const auto& p : pts) {
            if (&p == &top) continue;
            EXPECT_GT(objective_G(ctx, {top.psi, top.phi}), objective_G(ctx, {p.psi, p.phi}));
            EXPECT_GT(hadamard_leading_approximation(size, top.phi, top.psi),
                      hadamard_leading_approximation(size, p.phi, p.psi));
        }
    }
}

TEST(Convergence, HadamardRegimeApproachesClassical) {
    std::vector<std::uint64_t> sizes;
    for (unsigned n = 4; n <= 14; n += 2) sizes.push_back(std::uint64_t{1} << n);
    const auto pts = convergence_check(sizes, ConvergenceRegime::hadamard_first_step);
    ASSERT_EQ(pts.size(), sizes.size());
    for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LE(pts[i].distance, pts[i - 1].distance + 1e-9);
    EXPECT_LT(pts.back().distance, 1e-9);
}

TEST(Convergence, OrderFnOverNRegime) {
    const auto root = convergence_check({1024}, ConvergenceRegime::order_fN_over_N,
                                        [](double n) { return std::sqrt(n); });
    EXPECT_TRUE(is_phase_matched(root.front().optimum));

    const auto near_one = convergence_check({16}, ConvergenceRegime::order_fN_over_N,
                                            [](double n) { return 0.99 * n; });
    EXPECT_FALSE(is_phase_matched(near_one.front().optimum));

    EXPECT_THROW(convergence_check({16}, ConvergenceRegime::order_fN_over_N, [](double n) { return n; }),
                 std::invalid_argument);
    EXPECT_THROW(convergence_check({16}, ConvergenceRegime::order_fN_over_N), std::invalid_argument);
}

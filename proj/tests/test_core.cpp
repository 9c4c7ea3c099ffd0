#include "phasematch/core.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace phasematch;

namespace {

// Iterate matrix with a single shared phase, written out independently.
IterateMatrix single_phase_matrix(double phase, double n) {
    const cplx e = std::polar(1.0, phase);
    IterateMatrix a;
    a(0, 0) = e * ((1.0 - e) / n - 1.0);
    a(0, 1) = std::sqrt(n - 1.0) / n * (1.0 - e);
    a(1, 0) = std::sqrt(n - 1.0) / n * e * (1.0 - e);
    a(1, 1) = -(1.0 / n + (1.0 - 1.0 / n) * e);
    return a;
}

double max_entry_diff(const IterateMatrix& a, const IterateMatrix& b) {
    double d = 0.0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
    return d;
}

} // namespace

TEST(SearchSpace, ValidatesSizeAndTarget) {
    EXPECT_THROW(SearchSpace(0), std::invalid_argument);
    EXPECT_THROW(SearchSpace(63), std::invalid_argument);
    EXPECT_THROW(SearchSpace(3, 8), std::invalid_argument);
    EXPECT_NO_THROW(SearchSpace(3, 7));
    EXPECT_EQ(SearchSpace(5).size(), 32u);
    EXPECT_EQ(SearchSpace::from_size(1024).qubits(), 10u);
    EXPECT_THROW(SearchSpace::from_size(24), std::invalid_argument);
    EXPECT_THROW(SearchSpace::from_size(1), std::invalid_argument);
}

TEST(HadamardInit, UniformAmplitude) {
    const ReducedState s4 = hadamard_init(SearchSpace(2));
    EXPECT_NEAR(s4.alpha(), kPi / 6, 1e-15);
    EXPECT_EQ(s4.theta(), 0.0);

    const ReducedState s32 = hadamard_init(SearchSpace(5));
    EXPECT_NEAR(std::sin(s32.alpha()), 0.176777, 1e-6);
    EXPECT_NEAR(target_probability(s32), 1.0 / 32, 1e-15);

    EXPECT_NEAR(std::sin(hadamard_init(SearchSpace(10)).alpha()), 0.03125, 1e-15);
}

TEST(ReducedState, RejectsAlphaOutOfRangeAndWrapsTheta) {
    EXPECT_THROW(ReducedState(-0.1, 0.0), std::invalid_argument);
    EXPECT_THROW(ReducedState(2.0, 0.0), std::invalid_argument);
    EXPECT_NEAR(ReducedState(0.3, 5 * kPi / 3).theta(), -kPi / 3, 1e-15);
    EXPECT_EQ(ReducedState(0.3, -kPi).theta(), kPi);
}

TEST(ReducedState, FromPairRemovesGlobalPhase) {
    const ComplexPair v{std::polar(0.6, 1.1), std::polar(0.8, -0.4)};
    const ReducedState s = ReducedState::from_pair(v);
    EXPECT_NEAR(std::sin(s.alpha()), 0.6, 1e-15);
    EXPECT_NEAR(s.theta(), 1.5, 1e-15);
    const ComplexPair w = s.to_pair();
    EXPECT_NEAR(w.a_rest.imag(), 0.0, 1e-16);
    EXPECT_GE(w.a_rest.real(), 0.0);
    EXPECT_NEAR(w.norm_squared(), 1.0, 1e-15);
}

TEST(ReducedState, ThetaIsZeroAtProbabilityOne) {
    const ReducedState s = ReducedState::from_pair({std::polar(1.0, 2.0), 0.0});
    EXPECT_EQ(s.alpha(), kPi / 2);
    EXPECT_EQ(s.theta(), 0.0);
}

TEST(IterateMatrix, ZeroPhasesGiveMinusIdentity) {
    for (unsigned n : {1u, 4u, 10u}) {
        const IterateMatrix a = iterate_matrix({0.0, 0.0}, SearchSpace(n));
        EXPECT_EQ(a(0, 0), cplx(-1.0, 0.0));
        EXPECT_EQ(a(1, 1), cplx(-1.0, 0.0));
        EXPECT_EQ(a(0, 1), cplx(0.0, 0.0));
        EXPECT_EQ(a(1, 0), cplx(0.0, -0.0));
    }
}

TEST(IterateMatrix, ClassicalEntryAtNFour) {
    const IterateMatrix a = iterate_matrix(PhasePair::classical(), SearchSpace(2));
    EXPECT_NEAR(a(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(a(1, 1).imag(), 0.0, 1e-15);
}

TEST(IterateMatrix, SpecializesToSharedPhaseForm) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int k = 0; k < 50; ++k) {
        const double x = angle(rng);
        const SearchSpace space(1 + static_cast<unsigned>(k % 12));
        EXPECT_LT(max_entry_diff(iterate_matrix({x, x}, space), single_phase_matrix(x, space.size_real())), 1e-15);
    }
    const SearchSpace space(5);
    EXPECT_EQ(max_entry_diff(iterate_matrix(PhasePair::classical(), space), single_phase_matrix(kPi, 32.0)), 0.0);
}

TEST(IterateMatrix, UnitaryForRandomInputs) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_int_distribution<unsigned> qubits(1, 30);
    for (int k = 0; k < 100; ++k) {
        const IterateMatrix a = iterate_matrix({angle(rng), angle(rng)}, SearchSpace(qubits(rng)));
        EXPECT_LT(a.unitarity_error(), 1e-12);
    }
}

TEST(ApplyIterate, ReproducesClassicalTrace) {
    // Target amplitude and probability after each classical step, N = 32.
    const double amplitude[] = {0.5082, 0.7762, 0.9471, 0.9996};
    const double probability[] = {0.2583, 0.6024, 0.8969, 0.9992};
    const SearchSpace space(5);
    ReducedState s = hadamard_init(space);
    for (int k = 0; k < 4; ++k) {
        s = apply_iterate(s, PhasePair::classical(), space);
        EXPECT_NEAR(std::sin(s.alpha()), amplitude[k], 5e-5) << "step " << k + 1;
        EXPECT_NEAR(target_probability(s), probability[k], 5e-5) << "step " << k + 1;
    }
}

TEST(ApplyIterate, ZeroPhasesLeaveStateUnchanged) {
    const SearchSpace space(6);
    const ReducedState s(0.7, 1.3);
    const ReducedState t = apply_iterate(s, {0.0, 0.0}, space);
    EXPECT_NEAR(t.alpha(), s.alpha(), 1e-15);
    EXPECT_NEAR(t.theta(), s.theta(), 1e-15);
}

TEST(ApplyIterate, ExactSearchAtNFour) {
    const SearchSpace space(2);
    const ReducedState s = apply_iterate(hadamard_init(space), PhasePair::classical(), space);
    EXPECT_NEAR(target_probability(s), 1.0, 1e-15);
    EXPECT_EQ(s.theta(), 0.0);
}

TEST(TargetProbability, Examples) {
    EXPECT_EQ(target_probability(ReducedState(kPi / 2, 0.0)), 1.0);
    EXPECT_EQ(target_probability(ReducedState(0.0, 0.0)), 0.0);
    EXPECT_NEAR(target_probability(ReducedState(std::asin(0.9471), 0.0)), 0.9471 * 0.9471, 1e-15);
}

TEST(OneStepProbability, Examples) {
    EXPECT_NEAR(one_step_probability(hadamard_init(SearchSpace(2)), PhasePair::classical(), SearchSpace(2)), 1.0,
                1e-15);
    // Optimized final step of the five-qubit example.
    EXPECT_NEAR(one_step_probability(ReducedState(std::asin(0.9471), 0.0), {-2.3493, -2.7218}, SearchSpace(5)), 1.0,
                1e-4);
    const ReducedState s(0.4, 0.9);
    for (double phi : {-3.0, -1.0, 0.0, 0.5, 2.5})
        EXPECT_NEAR(one_step_probability(s, {0.0, phi}, SearchSpace(7)), target_probability(s), 1e-15);
}

TEST(OneStepProbability, AgreesWithApplyIterate) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> alpha(0.0, kPi / 2);
    std::uniform_int_distribution<unsigned> qubits(1, 20);
    for (int k = 0; k < 1000; ++k) {
        const SearchSpace space(qubits(rng));
        const ReducedState s(alpha(rng), angle(rng));
        const PhasePair p(angle(rng), angle(rng));
        const double direct = one_step_probability(s, p, space);
        EXPECT_NEAR(direct, target_probability(apply_iterate(s, p, space)), 1e-12);
        // theta moves into the oracle phase
        EXPECT_NEAR(direct, one_step_probability(ReducedState(s.alpha(), 0.0), {p.psi, p.phi + s.theta()}, space),
                    1e-12);
        EXPECT_NEAR(apply_iterate_raw(s.to_pair(), p, space).norm_squared(), 1.0, 1e-12);
    }
}

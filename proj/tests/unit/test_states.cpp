#include <gtest/gtest.h>

#include <cmath>

#include "cubicgen/error.hpp"
#include "cubicgen/states.hpp"
#include "test_support.hpp"

using namespace cubicgen;

namespace {

// <2n|S(xi)|0> for S = exp((xi* a^2 - xi a^dag^2) / 2).
Complex squeezed_amplitude(Complex xi, int n) {
    const double r = std::abs(xi);
    const Complex ratio = -std::polar(std::tanh(r), std::arg(xi));
    const double combinatorial = std::exp(0.5 * std::lgamma(2.0 * n + 1.0) - n * std::log(2.0) - std::lgamma(n + 1.0));
    return std::pow(ratio, n) * combinatorial / std::sqrt(std::cosh(r));
}

}  // namespace

TEST(States, SqueezingFromDecibels) {
    EXPECT_NEAR(squeezing_from_db(5.0), -0.575646273, 1e-9);
    EXPECT_EQ(squeezing_from_db(0.0), 0.0);
    EXPECT_NEAR(squeezing_from_db(20.0), -std::log(10.0), 1e-15);
}

TEST(States, ZeroCubicityTargetIsSqueezedVacuum) {
    const FockSpace space = FockSpace::single(30);
    const TargetState t = cubic_phase_target(0.0, 5.0, space);
    const Complex xi(squeezing_from_db(5.0), 0.0);
    for (int n = 0; 2 * n <= 30; ++n) {
        EXPECT_LT(std::abs(t.state.amplitudes()[2 * n] - squeezed_amplitude(xi, n)), 1e-8) << n;
        if (2 * n + 1 <= 30) EXPECT_LT(std::abs(t.state.amplitudes()[2 * n + 1]), 1e-12);
    }
}

TEST(States, TruncatedSqueezerMatchesClosedFormAtLowLevels) {
    const FockSpace space = FockSpace::single(30);
    for (const Complex xi : {Complex(-0.5756, 0.0), std::polar(0.4, 1.2)}) {
        const StateVector s = single_mode_squeezer(xi, space) * fock_state(space, 0);
        for (int n = 0; n <= 8; ++n) {
            EXPECT_LT(std::abs(s.amplitudes()[2 * n] - squeezed_amplitude(xi, n)), 1e-8) << n;
        }
    }
}

TEST(States, CoherentStateClosedForm) {
    const FockSpace space = FockSpace::single(30);
    for (const Complex beta : {Complex(0.5, 0.0), Complex(1.2, -0.7), Complex(2.0, 0.0)}) {
        const StateVector s = coherent_state(beta, space);
        double factorial = 1.0;
        for (int n = 0; n <= 15; ++n) {
            if (n > 0) factorial *= n;
            const Complex expected = std::exp(-std::norm(beta) / 2.0) * std::pow(beta, n) / std::sqrt(factorial);
            EXPECT_LT(std::abs(s.amplitudes()[n] - expected), 1e-8) << beta << " " << n;
        }
        const StateVector d = single_mode_displacement(beta, space) * fock_state(space, 0);
        EXPECT_LT(testing_support::max_abs_diff(ComplexVector(d.amplitudes().head(16)),
                                                ComplexVector(s.amplitudes().head(16))),
                  1e-8);
    }
}

TEST(States, TargetIsNormalizedAndReportsTail) {
    const TargetState t = cubic_phase_target(0.15, 5.0, FockSpace::single(30));
    EXPECT_NEAR(t.state.norm(), 1.0, 1e-14);
    EXPECT_GT(t.tail_mass, 0.0);
    EXPECT_LT(t.tail_mass, 1e-4);
    EXPECT_GE(t.working_cutoff, 60);
    EXPECT_GT(t.truncated_mass, 0.0);
}

TEST(States, TargetAgreesAcrossCutoffsOnSharedSupport) {
    const TargetState low = cubic_phase_target(0.15, 5.0, FockSpace::single(30));
    const TargetState high = cubic_phase_target(0.15, 5.0, FockSpace::single(40));
    const ComplexVector head = high.state.amplitudes().head(31);
    EXPECT_LT(testing_support::max_abs_diff(low.state.amplitudes(), ComplexVector(head / head.norm())), 1e-8);
    // Without renormalization the difference is set by the mass above level 30.
    const double raw = testing_support::max_abs_diff(low.state.amplitudes(), head);
    EXPECT_LT(raw, low.truncated_mass);
}

TEST(States, StrictModeRejectsHeavyTail) {
    EXPECT_THROW(cubic_phase_target(0.15, 5.0, FockSpace::single(30), true), NumericError);
    EXPECT_NO_THROW(cubic_phase_target(0.15, 5.0, FockSpace::single(60), true));
    EXPECT_NO_THROW(cubic_phase_target(0.0, 3.0, FockSpace::single(30), true));
}

TEST(States, RejectsBadInput) {
    EXPECT_THROW(cubic_phase_target(0.1, 5.0, FockSpace::two_mode(10)), ConfigError);
    EXPECT_THROW(cubic_phase_target(std::nan(""), 5.0, FockSpace::single(10)), ConfigError);
}

TEST(States, CubicPhaseOnlyChangesPhasesInPositionBasis) {
    // The cubic phase is diagonal in q, so it leaves the q distribution of the
    // squeezed vacuum unchanged: <q^2> agrees with and without it.
    const FockSpace space = FockSpace::single(40);
    const OperatorMatrix q = position_operator(space);
    const StateVector with = cubic_phase_target(0.1, 4.0, space).state;
    const StateVector without = cubic_phase_target(0.0, 4.0, space).state;
    const double q2_with = with.inner(q * (q * with)).real();
    const double q2_without = without.inner(q * (q * without)).real();
    EXPECT_NEAR(q2_with, q2_without, 1e-6);
}

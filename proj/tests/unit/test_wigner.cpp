#include <gtest/gtest.h>

#include <cmath>

#include "cubicgen/error.hpp"
#include "cubicgen/states.hpp"
#include "cubicgen/wigner.hpp"
#include "test_support.hpp"

using namespace cubicgen;
using testing_support::kPi;

namespace {

double laguerre(int n, double x) {
    double prev = 1.0;
    double cur = 1.0 - x;
    if (n == 0) return prev;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace

TEST(Wigner, VacuumPeakAndShape) {
    const StateVector vac = fock_state(FockSpace::single(20), 0);
    EXPECT_NEAR(wigner_at(vac, 0.0, 0.0), 2.0 / kPi, 1e-6);
    EXPECT_NEAR(wigner_at(vac, 0.3, -0.4), 2.0 / kPi * std::exp(-2.0 * 0.25), 1e-12);
}

TEST(Wigner, FockStatesMatchLaguerreForm) {
    const FockSpace space = FockSpace::single(12);
    EXPECT_NEAR(wigner_at(fock_state(space, 1), 0.0, 0.0), -2.0 / kPi, 1e-12);
    for (int n : {2, 3, 7}) {
        for (const auto& [q, p] : {std::pair{0.2, 0.1}, std::pair{-0.8, 0.5}, std::pair{1.3, -1.1}}) {
            const double r2 = q * q + p * p;
            const double expected = 2.0 / kPi * (n % 2 ? -1.0 : 1.0) * std::exp(-2.0 * r2) * laguerre(n, 4.0 * r2);
            EXPECT_NEAR(wigner_at(fock_state(space, n), q, p), expected, 1e-12) << n;
        }
    }
}

TEST(Wigner, CoherentStateIsCentredAtItsAmplitude) {
    const Complex beta(0.8, -0.5);
    const StateVector s = coherent_state(beta, FockSpace::single(30));
    EXPECT_NEAR(wigner_at(s, beta.real(), beta.imag()), 2.0 / kPi, 1e-8);
    EXPECT_NEAR(wigner_at(s, beta.real() + 0.3, beta.imag()), 2.0 / kPi * std::exp(-2.0 * 0.09), 1e-8);
    EXPECT_LT(wigner_at(s, -beta.real(), -beta.imag()), 1e-3);
}

TEST(Wigner, TargetGridIntegratesToOne) {
    const StateVector t = cubic_phase_target(0.15, 5.0, FockSpace::single(30)).state;
    const auto axis = linspace(-5.0, 5.0, 201);
    const WignerGrid grid = wigner(t, axis, axis);
    EXPECT_NEAR(grid.integral(), 1.0, 1e-2);
    EXPECT_EQ(grid.values.rows(), 201);
    EXPECT_EQ(grid.values.cols(), 201);
}

TEST(Wigner, VacuumMarginalIsGaussian) {
    const StateVector vac = fock_state(FockSpace::single(10), 0);
    const auto q = linspace(-2.0, 2.0, 41);
    const auto p = linspace(-6.0, 6.0, 601);
    const WignerGrid grid = wigner(vac, q, p);
    const auto marginal = grid.q_marginal();
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_NEAR(marginal[i], std::sqrt(2.0 / kPi) * std::exp(-2.0 * q[i] * q[i]), 1e-5);
    }
}

TEST(Wigner, GridMatchesPointEvaluation) {
    const StateVector s = cubic_phase_target(0.2, 3.0, FockSpace::single(20)).state;
    const std::vector<double> q{-1.0, 0.0, 0.7};
    const std::vector<double> p{-0.5, 0.25};
    const WignerGrid grid = wigner(s, q, p);
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            EXPECT_NEAR(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                        wigner_at(s, q[i], p[j]), 1e-14);
        }
    }
}

TEST(Wigner, RejectsBadInput) {
    const StateVector vac = fock_state(FockSpace::single(4), 0);
    const std::vector<double> empty;
    const std::vector<double> one{0.0};
    EXPECT_THROW(wigner(vac, empty, one), ConfigError);
    EXPECT_THROW(wigner_at(fock_state(FockSpace::two_mode(3), 0, 0), 0.0, 0.0), ConfigError);
    EXPECT_THROW(linspace(0.0, 1.0, 0), ConfigError);
}

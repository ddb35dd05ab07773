#include <gtest/gtest.h>

#include <cmath>

#include "cubicgen/block_operator.hpp"
#include "cubicgen/circuit.hpp"
#include "cubicgen/error.hpp"
#include "cubicgen/matrix_exp.hpp"
#include "cubicgen/states.hpp"
#include "test_support.hpp"

using namespace cubicgen;
using testing_support::kPi;
using testing_support::max_abs_diff;

namespace {

const Complex kI{0.0, 1.0};

OperatorMatrix dense_beamsplitter(double phi, const FockSpace& s) {
    const OperatorMatrix g = creator(s, 1) * annihilator(s, 2) + annihilator(s, 1) * creator(s, 2);
    return matrix_exp(g * Complex(0.0, phi));
}

OperatorMatrix dense_squeezer(Complex xi, const FockSpace& s) {
    const OperatorMatrix g =
        annihilator(s, 1) * annihilator(s, 2) * std::conj(xi) - creator(s, 1) * creator(s, 2) * xi;
    return matrix_exp(g);
}

OperatorMatrix dense_displacement(Complex beta, const FockSpace& s) {
    return matrix_exp(creator(s, 2) * beta - annihilator(s, 2) * std::conj(beta));
}

OperatorMatrix build_for(OperatorId which, const ParamVector& x, const FockSpace& s) {
    switch (which) {
        case OperatorId::DisplacementAlpha: return build_displacement(x.alpha(), 0.0, 2, s);
        case OperatorId::BeamsplitterPhi: return build_beamsplitter(x.phi_bs(), s);
        case OperatorId::RotationTheta: return build_rotation(x.theta(), 2, s);
        case OperatorId::SqueezerAbs:
        case OperatorId::SqueezerPhase: return build_two_mode_squeezer(x.xi_abs(), x.phi_xi(), s);
        case OperatorId::DisplacementAbs:
        case OperatorId::DisplacementPhase: return build_displacement(x.beta_abs(), x.phi_beta(), 2, s);
    }
    throw std::logic_error("unreachable");
}

double loss_at(const ParamVector& x, const StateVector& target, const FockSpace& s) {
    return 1.0 - evaluate_fidelity(x, target, s);
}

}  // namespace

TEST(CircuitBlocks, SectorExponentialsMatchDenseGenerators) {
    const FockSpace s = FockSpace::two_mode(8);
    EXPECT_LT(max_abs_diff(build_beamsplitter(0.7, s).entries(), dense_beamsplitter(0.7, s).entries()), 1e-12);
    const Complex xi = std::polar(0.45, 2.1);
    EXPECT_LT(max_abs_diff(build_two_mode_squeezer(0.45, 2.1, s).entries(), dense_squeezer(xi, s).entries()), 1e-12);
    const Complex beta = std::polar(0.8, -0.6);
    EXPECT_LT(max_abs_diff(build_displacement(0.8, -0.6, 2, s).entries(), dense_displacement(beta, s).entries()),
              1e-12);
    const OperatorMatrix r = matrix_exp(number_operator(s, 2) * Complex(0.0, 1.3));
    EXPECT_LT(max_abs_diff(build_rotation(1.3, 2, s).entries(), r.entries()), 1e-13);
}

TEST(CircuitBlocks, BlockAlgebraMatchesDenseAlgebra) {
    const FockSpace s = FockSpace::two_mode(6);
    const BlockOperator a = two_mode_squeezer_block(0.3, 0.4, s);
    const BlockOperator b = two_mode_squeezer_block(0.2, 1.9, s);
    EXPECT_LT(max_abs_diff((a * b).dense().entries(), (a.dense() * b.dense()).entries()), 1e-14);
    EXPECT_LT(max_abs_diff(a.adjoint().dense().entries(), a.dense().adjoint().entries()), 1e-15);
    const ComplexVector v = testing_support::random_matrix(s.dim(), 5).col(0);
    EXPECT_LT(max_abs_diff(a.apply(v), a.dense().entries() * v), 1e-13);
    const BlockOperator other_kind = beamsplitter_block(0.2, s);
    EXPECT_THROW(a * other_kind, ConfigError);
}

TEST(CircuitBlocks, PhaseConjugationAndDiagonalCommutator) {
    const FockSpace s = FockSpace::two_mode(5);
    const BlockOperator d = displacement_block(0.7, 0.0, 2, s);
    Eigen::VectorXd angles(s.dim());
    for (Eigen::Index k = 0; k < angles.size(); ++k) angles[k] = 0.37 * static_cast<double>(k % 6);
    ComplexVector phases(s.dim());
    for (Eigen::Index k = 0; k < phases.size(); ++k) phases[k] = std::polar(1.0, angles[k]);
    const ComplexMatrix p = phases.asDiagonal();
    EXPECT_LT(max_abs_diff(d.conjugated_by_phases(angles).dense().entries(),
                           p * d.dense().entries() * p.adjoint()),
              1e-14);
    const ComplexMatrix diag = angles.cast<Complex>().asDiagonal();
    EXPECT_LT(max_abs_diff(d.diagonal_commutator(angles).dense().entries(),
                           diag * d.dense().entries() - d.dense().entries() * diag),
              1e-14);
}

TEST(CircuitOracles, TwoModeSqueezedVacuumClosedForm) {
    const FockSpace s = FockSpace::two_mode(30);
    for (double r : {0.1, 0.35, 0.6}) {
        const double phi = 0.8;
        const StateVector out = build_two_mode_squeezer(r, phi, s) * fock_state(s, 0, 0);
        for (int n = 0; n <= 12; ++n) {
            const Complex expected = std::pow(-std::polar(std::tanh(r), phi), n) / std::cosh(r);
            EXPECT_LT(std::abs(out.amplitudes()[s.index(n, n)] - expected), 1e-8) << "r " << r << " n " << n;
        }
    }
}

TEST(CircuitOracles, DisplacementGivesCoherentAmplitudes) {
    const FockSpace s = FockSpace::two_mode(30);
    for (double alpha : {0.3, 1.0, 2.0}) {
        const StateVector out = build_displacement(alpha, 0.0, 2, s) * fock_state(s, 0, 0);
        double factorial = 1.0;
        for (int n = 0; n <= 15; ++n) {
            if (n > 0) factorial *= n;
            const double expected = std::exp(-alpha * alpha / 2.0) * std::pow(alpha, n) / std::sqrt(factorial);
            EXPECT_LT(std::abs(out.amplitudes()[s.index(0, n)] - expected), 1e-10) << alpha << " " << n;
        }
    }
}

TEST(CircuitOracles, BeamsplitterTransmissionIsCosineSquared) {
    const FockSpace s = FockSpace::two_mode(4);
    for (double phi : {0.0, kPi / 4.0, 0.3, kPi / 2.0}) {
        const StateVector out = build_beamsplitter(phi, s) * fock_state(s, 1, 0);
        EXPECT_NEAR(std::norm(out.amplitudes()[s.index(1, 0)]), std::cos(phi) * std::cos(phi), 1e-14);
        EXPECT_LT(std::abs(out.amplitudes()[s.index(0, 1)] - kI * std::sin(phi)), 1e-14);
    }
    EXPECT_NEAR(phi_bs_to_transmission(transmission_to_phi_bs(0.8)), 0.8, 1e-15);
    EXPECT_NEAR(transmission_to_phi_bs(0.5), kPi / 4.0, 1e-15);
    EXPECT_THROW(transmission_to_phi_bs(0.0), ConfigError);
    EXPECT_THROW(transmission_to_phi_bs(1.2), ConfigError);
}

TEST(CircuitOracles, RotationPhases) {
    const FockSpace s = FockSpace::two_mode(5);
    const OperatorMatrix r = build_rotation(0.4, 2, s);
    for (int n = 0; n <= 5; ++n) {
        EXPECT_LT(std::abs(r(s.index(3, n), s.index(3, n)) - std::polar(1.0, 0.4 * n)), 1e-15);
    }
    const OperatorMatrix single = build_rotation(0.4, 1, FockSpace::single(5));
    EXPECT_LT(std::abs(single(3, 3) - std::polar(1.0, 1.2)), 1e-15);
}

TEST(CircuitIdentities, PhasesSeparateFromMagnitudes) {
    const FockSpace s = FockSpace::two_mode(7);
    const double phi = 1.1;
    const OperatorMatrix half = build_rotation(phi / 2.0, 1, s) * build_rotation(phi / 2.0, 2, s);
    const OperatorMatrix lhs = build_two_mode_squeezer(0.4, phi, s);
    const OperatorMatrix rhs = half * build_two_mode_squeezer(0.4, 0.0, s) * half.adjoint();
    EXPECT_LT(max_abs_diff(lhs.entries(), rhs.entries()), 1e-13);

    const OperatorMatrix rot = build_rotation(phi, 2, s);
    EXPECT_LT(max_abs_diff(build_displacement(0.6, phi, 2, s).entries(),
                           (rot * build_displacement(0.6, 0.0, 2, s) * rot.adjoint()).entries()),
              1e-13);
}

TEST(CircuitGradients, OperatorDerivativesMatchCentralDifferences) {
    const FockSpace s = FockSpace::two_mode(6);
    const double h = 1e-5;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ParamVector x = testing_support::random_params(seed);
        for (Param p : kAllParams) {
            const OperatorId which = operator_for(p);
            ParamVector plus = x;
            ParamVector minus = x;
            plus[p] += h;
            minus[p] -= h;
            const ComplexMatrix fd = (build_for(which, plus, s).entries() - build_for(which, minus, s).entries()) / (2.0 * h);
            const ComplexMatrix analytic = operator_gradient(which, x, s).entries();
            const double scale = analytic.cwiseAbs().maxCoeff();
            ASSERT_GT(scale, 0.0);
            EXPECT_LT(max_abs_diff(analytic, fd) / scale, 1e-6) << param_name(p) << " seed " << seed;
        }
    }
}

TEST(CircuitGradients, StateDerivativesFollowProductRule) {
    const FockSpace s = FockSpace::two_mode(6);
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        const ParamVector x = testing_support::random_params(seed);
        const Interferometer circuit(x, s);
        const auto d = circuit.output_derivatives();
        const StateVector input = circuit.input_state();
        EXPECT_LT(max_abs_diff(circuit.output(), (build_unitary(x, s) * input).amplitudes()), 1e-13);
        for (Param p : kAllParams) {
            const ComplexVector expected = (unitary_gradient(p, x, s) * input).amplitudes();
            EXPECT_LT(max_abs_diff(d[static_cast<std::size_t>(p)], expected), 1e-12) << param_name(p);
        }
    }
}

TEST(CircuitGradients, LossGradientMatchesCentralDifferences) {
    const FockSpace s = FockSpace::two_mode(14);
    const StateVector target = cubic_phase_target(0.15, 5.0, FockSpace::single(14)).state;
    const double h = 1e-5;
    for (std::uint64_t seed = 200; seed < 220; ++seed) {
        const ParamVector x = testing_support::random_params(seed);
        const GradientBundle b = projected_state_gradient(x, target, s);
        EXPECT_NEAR(b.loss, loss_at(x, target, s), 1e-14);
        for (Param p : kAllParams) {
            ParamVector plus = x;
            ParamVector minus = x;
            plus[p] += h;
            minus[p] -= h;
            const double fd = (loss_at(plus, target, s) - loss_at(minus, target, s)) / (2.0 * h);
            const double a = b.grad[static_cast<std::size_t>(p)];
            const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-4});
            EXPECT_LT(rel, 1e-6) << param_name(p) << " seed " << seed << " analytic " << a << " fd " << fd;
        }
    }
}

TEST(CircuitGradients, LossIsInvariantUnderTargetGlobalPhase) {
    const FockSpace s = FockSpace::two_mode(10);
    const StateVector target = cubic_phase_target(0.2, 4.0, FockSpace::single(10)).state;
    const StateVector rotated(target.space(), target.amplitudes() * std::polar(1.0, 1.234));
    const ParamVector x = testing_support::random_params(7);
    const GradientBundle a = projected_state_gradient(x, target, s);
    const GradientBundle b = projected_state_gradient(x, rotated, s);
    EXPECT_NEAR(a.loss, b.loss, 1e-14);
    for (std::size_t i = 0; i < kParamCount; ++i) EXPECT_NEAR(a.grad[i], b.grad[i], 1e-13);
}

TEST(CircuitGradients, PhaseOfVanishingDisplacementHasZeroGradient) {
    const FockSpace s = FockSpace::two_mode(10);
    const StateVector target = cubic_phase_target(0.15, 5.0, FockSpace::single(10)).state;
    ParamVector x = testing_support::random_params(3);
    x[Param::BetaAbs] = 0.0;
    const GradientBundle b = projected_state_gradient(x, target, s);
    EXPECT_EQ(b.grad[static_cast<std::size_t>(Param::PhiBeta)], 0.0);
    ParamVector plus = x;
    ParamVector minus = x;
    plus[Param::PhiBeta] += 1e-5;
    minus[Param::PhiBeta] -= 1e-5;
    EXPECT_EQ(loss_at(plus, target, s) - loss_at(minus, target, s), 0.0);
}

TEST(CircuitGradients, FixedParametersGetNoGradient) {
    const FockSpace s = FockSpace::two_mode(8);
    const StateVector target = cubic_phase_target(0.1, 3.0, FockSpace::single(8)).state;
    ParamVector x = testing_support::random_params(9);
    x.set_fixed(Param::PhiBs);
    x.set_fixed(Param::Theta);
    const GradientBundle b = projected_state_gradient(x, target, s);
    EXPECT_EQ(b.grad[static_cast<std::size_t>(Param::PhiBs)], 0.0);
    EXPECT_EQ(b.grad[static_cast<std::size_t>(Param::Theta)], 0.0);
    EXPECT_NE(b.grad[static_cast<std::size_t>(Param::Alpha)], 0.0);
}

TEST(CircuitProjection, NormalizesAndReportsProbability) {
    const FockSpace s = FockSpace::two_mode(12);
    const ParamVector x = testing_support::random_params(21);
    const Interferometer circuit(x, s);
    const ProjectedOutput out = circuit.heralded();
    EXPECT_NEAR(out.state.norm(), 1.0, 1e-14);
    const ComplexVector slice = circuit.output().segment(s.index(2, 0), s.levels());
    EXPECT_NEAR(out.detection_probability, slice.squaredNorm(), 1e-15);
    EXPECT_NEAR(out.norm_coefficient * out.norm_coefficient, out.detection_probability, 1e-15);
    EXPECT_LE(out.detection_probability, 1.0);
}

TEST(CircuitProjection, EmptyHeraldSliceIsDegenerate) {
    const FockSpace s = FockSpace::two_mode(4);
    EXPECT_THROW(project_and_normalize(fock_state(s, 0, 3)), DegenerateProjection);
    // Full reflection sends both photons to mode 2; cos(pi/2) is not exactly
    // zero in floating point, so only rounding-level weight is heralded.
    const ParamVector x({0.0, kPi / 2.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    EXPECT_LT(heralded_output(x, s).detection_probability, 1e-28);
}

TEST(CircuitProjection, BalancedOptimumReproducesTabulatedValues) {
    const FockSpace s = FockSpace::two_mode(30);
    const StateVector target = cubic_phase_target(0.15, 5.0, FockSpace::single(30)).state;
    const ParamVector x = testing_support::balanced_target1_optimum();
    const ProjectedOutput out = heralded_output(x, s);
    EXPECT_NEAR(fidelity(out.state, target), 0.9735, 2e-4);
    EXPECT_NEAR(out.norm_coefficient, 0.5170, 5e-4);
}

TEST(CircuitValidation, RejectsInvalidParameters) {
    const FockSpace s = FockSpace::two_mode(4);
    ParamVector x = testing_support::random_params(1);
    x[Param::XiAbs] = -0.1;
    EXPECT_THROW(heralded_output(x, s), ConfigError);
    x[Param::XiAbs] = std::nan("");
    EXPECT_THROW(heralded_output(x, s), ConfigError);
    EXPECT_THROW(Interferometer(testing_support::random_params(1), FockSpace::two_mode(1)), ConfigError);
}

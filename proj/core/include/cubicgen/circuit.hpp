#pragma once

#include <array>

#include "cubicgen/block_operator.hpp"
#include "cubicgen/fock_space.hpp"
#include "cubicgen/params.hpp"

namespace cubicgen {

// The interferometer input is |2>_1 (x) |0>_2; the coherent seed is the first
// circuit element D_2(alpha). Heralding projects mode 1 onto |2><2|.
inline constexpr int kInputPhotons = 2;
inline constexpr int kHeraldPhotons = 2;
inline constexpr double kDegenerateProbability = 1e-300;

// Circuit elements, each differentiated with respect to one real parameter.
enum class OperatorId {
    RotationTheta,      // R_2(theta) = exp(i theta n_2)
    BeamsplitterPhi,    // B(phi) = exp(i phi (a1^dag a2 + a1 a2^dag))
    SqueezerAbs,        // S(xi) = exp(xi^* a1 a2 - xi a1^dag a2^dag), d/d|xi|
    SqueezerPhase,      // same, d/d phi_xi
    DisplacementAbs,    // D_2(beta) = exp(beta a2^dag - beta^* a2), d/d|beta|
    DisplacementPhase,  // same, d/d phi_beta
    DisplacementAlpha,  // D_2(alpha) with real alpha
};

OperatorId operator_for(Param p);

// Block-sparse builders. Every truncated generator is exponentiated sector by
// sector, which gives exactly the exponential of the full truncated generator.
BlockOperator displacement_block(double beta_abs, double phi_beta, int mode, const FockSpace& space);
BlockOperator beamsplitter_block(double phi_bs, const FockSpace& space);
BlockOperator rotation_block(double theta, int mode, const FockSpace& space);
BlockOperator two_mode_squeezer_block(double xi_abs, double phi_xi, const FockSpace& space);

OperatorMatrix build_displacement(double beta_abs, double phi_beta, int mode, const FockSpace& space);
OperatorMatrix build_beamsplitter(double phi_bs, const FockSpace& space);
OperatorMatrix build_rotation(double theta, int mode, const FockSpace& space);
OperatorMatrix build_two_mode_squeezer(double xi_abs, double phi_xi, const FockSpace& space);

// U(x) = D_2(beta) S(xi) R_2(theta) B(phi_bs) D_2(alpha).
OperatorMatrix build_unitary(const ParamVector& x, const FockSpace& space);

// Derivative of one circuit element with respect to its parameter:
//   dR/dtheta     = i n_2 R
//   dB/dphi       = i (a1^dag a2 + a1 a2^dag) B
//   dS/d|xi|      = P K S(|xi|) P^dag,  K = a1 a2 - a1^dag a2^dag,  P = exp(i phi_xi N / 2)
//   dS/dphi_xi    = (i/2) [N, S],       N = n_1 + n_2
//   dD/d|beta|    = Q (a^dag - a) D(|beta|) Q^dag,  Q = exp(i phi_beta n_2)
//   dD/dphi_beta  = i [n_2, D]
//   dD/dalpha     = (a^dag - a) D(alpha)
BlockOperator operator_gradient_block(OperatorId which, const ParamVector& x, const FockSpace& space);
OperatorMatrix operator_gradient(OperatorId which, const ParamVector& x, const FockSpace& space);

// dU/dx_i by the product rule (dense; intended for small cutoffs).
OperatorMatrix unitary_gradient(Param p, const ParamVector& x, const FockSpace& space);

struct ProjectedOutput {
    StateVector state;  // single-mode state of channel 2
    double detection_probability = 0.0;  // <Psi|Pi|Psi>
    double norm_coefficient = 0.0;       // sqrt(detection_probability)
};

// Heralds mode 1 on |2>: phi_m = <2, m|Psi>, returned normalized. Throws
// DegenerateProjection when the probability is below kDegenerateProbability.
ProjectedOutput project_and_normalize(const StateVector& psi);

// The five circuit factors for one parameter point, with the forward
// intermediate states cached so all seven dPsi/dx_i come from one pass.
class Interferometer {
public:
    Interferometer(const ParamVector& x, const FockSpace& space);

    const FockSpace& space() const { return space_; }
    const ParamVector& params() const { return x_; }

    StateVector input_state() const;
    // Psi = U(x)|2, 0>.
    const ComplexVector& output() const { return stages_.back(); }
    // dPsi/dx_i; entries of fixed parameters are left empty.
    std::array<ComplexVector, kParamCount> output_derivatives() const;

    ProjectedOutput heralded() const;

private:
    static constexpr std::size_t kFactors = 5;

    FockSpace space_;
    ParamVector x_;
    std::array<BlockOperator, kFactors> factors_;
    std::array<ComplexVector, kFactors + 1> stages_;
};

ProjectedOutput heralded_output(const ParamVector& x, const FockSpace& space);

struct GradientBundle {
    double loss = 1.0;
    std::array<double, kParamCount> grad{};
    double fidelity = 0.0;
    double detection_probability = 0.0;
    double norm_coefficient = 0.0;
    // Set by callers that substitute a sentinel for a degenerate projection.
    bool degenerate = false;
};

// Infidelity 1 - |<psi(x)|target>|^2 and its gradient, propagating dPsi/dx_i
// through the normalized projection:
//   d psi = Pi dPsi / N - A_i Pi Psi / (2 N^3),  A_i = 2 Re <Psi|Pi|dPsi>.
// `space` is the two-mode space; `target` lives on the single-mode space of
// the same cutoff. Gradient entries of fixed parameters are zero.
GradientBundle projected_state_gradient(const ParamVector& x, const StateVector& target, const FockSpace& space);

double evaluate_fidelity(const ParamVector& x, const StateVector& target, const FockSpace& space);

}  // namespace cubicgen

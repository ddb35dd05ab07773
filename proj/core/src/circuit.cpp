#include "cubicgen/circuit.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "cubicgen/error.hpp"
#include "cubicgen/matrix_exp.hpp"

namespace cubicgen {
namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::VectorXd occupation(const FockSpace& space, int mode) {
    const int d = space.levels();
    Eigen::VectorXd n(space.dim());
    for (int n1 = 0; n1 < d; ++n1) {
        for (int n2 = 0; n2 < d; ++n2) {
            n[space.index(n1, n2)] = mode == 1 ? n1 : n2;
        }
    }
    return n;
}

Eigen::VectorXd total_number(const FockSpace& space) {
    return occupation(space, 1) + occupation(space, 2);
}

SectorKind local_kind(int mode) {
    if (mode == 1) return SectorKind::Mode1Local;
    if (mode == 2) return SectorKind::Mode2Local;
    throw ConfigError("mode must be 1 or 2, got " + std::to_string(mode));
}

// Same single-mode matrix in every sector of a local decomposition.
BlockOperator replicate_local(const ComplexMatrix& single, int mode, const FockSpace& space) {
    space.require_modes(2, "local two-mode operator");
    std::vector<ComplexMatrix> blocks(static_cast<std::size_t>(space.levels()), single);
    return BlockOperator(space, local_kind(mode), std::move(blocks));
}

// beta a^dag - beta^* a on one mode.
BlockOperator displacement_generator(Complex beta, int mode, const FockSpace& space) {
    const ComplexMatrix a = ladder_matrix(space.cutoff());
    return replicate_local(beta * a.adjoint() - std::conj(beta) * a, mode, space);
}

BlockOperator quadrature_generator(int mode, const FockSpace& space) {
    return displacement_generator(Complex(1.0, 0.0), mode, space);
}

BlockOperator beamsplitter_generator(const FockSpace& space) {
    space.require_modes(2, "beamsplitter");
    const auto sectors = sector_indices(space, SectorKind::TotalNumber);
    const int d = space.levels();
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(sectors.size());
    for (const auto& idx : sectors) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        ComplexMatrix g = ComplexMatrix::Zero(n, n);
        for (Eigen::Index j = 0; j + 1 < n; ++j) {
            const auto flat = idx[static_cast<std::size_t>(j)];
            const auto n1 = static_cast<double>(flat / d);
            const auto n2 = static_cast<double>(flat % d);
            const double v = std::sqrt((n1 + 1.0) * n2);
            g(j + 1, j) = v;
            g(j, j + 1) = v;
        }
        blocks.push_back(std::move(g));
    }
    return BlockOperator(space, SectorKind::TotalNumber, std::move(blocks));
}

// xi^* a1 a2 - xi a1^dag a2^dag.
BlockOperator squeezer_generator(Complex xi, const FockSpace& space) {
    space.require_modes(2, "two-mode squeezer");
    const auto sectors = sector_indices(space, SectorKind::NumberDifference);
    const int d = space.levels();
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(sectors.size());
    for (const auto& idx : sectors) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        ComplexMatrix g = ComplexMatrix::Zero(n, n);
        for (Eigen::Index j = 1; j < n; ++j) {
            const auto flat = idx[static_cast<std::size_t>(j)];
            const auto n1 = static_cast<double>(flat / d);
            const auto n2 = static_cast<double>(flat % d);
            const double v = std::sqrt(n1 * n2);
            g(j - 1, j) = std::conj(xi) * v;
            g(j, j - 1) = -xi * v;
        }
        blocks.push_back(std::move(g));
    }
    return BlockOperator(space, SectorKind::NumberDifference, std::move(blocks));
}

// Eigendecomposition H = V diag(lambda) V^dag of every sector block of a
// Hermitian generator, so exp(i t H) costs one product per block.
struct SpectralBlocks {
    std::vector<Eigen::VectorXd> values;
    std::vector<ComplexMatrix> vectors;
};

enum class CachedGenerator { Beamsplitter, SqueezerReal };

std::shared_ptr<const SpectralBlocks> spectral_blocks(CachedGenerator which, const FockSpace& space) {
    static std::mutex mutex;
    static std::map<std::pair<int, CachedGenerator>, std::shared_ptr<const SpectralBlocks>> cache;
    const auto key = std::make_pair(space.cutoff(), which);
    {
        const std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    // Beamsplitter: H = a1^dag a2 + a1 a2^dag. Squeezer: H = -i (a1 a2 - a1^dag a2^dag).
    const BlockOperator h = which == CachedGenerator::Beamsplitter
                                ? beamsplitter_generator(space)
                                : squeezer_generator(Complex(1.0, 0.0), space) * Complex(0.0, -1.0);
    auto spectral = std::make_shared<SpectralBlocks>();
    for (const ComplexMatrix& block : h.blocks()) {
        const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(block);
        if (solver.info() != Eigen::Success) {
            throw NumericError("eigendecomposition of a generator block failed");
        }
        spectral->values.push_back(solver.eigenvalues());
        spectral->vectors.push_back(solver.eigenvectors());
    }
    const std::lock_guard lock(mutex);
    return cache.emplace(key, std::move(spectral)).first->second;
}

BlockOperator spectral_exp(CachedGenerator which, double t, const FockSpace& space) {
    space.require_modes(2, "spectral_exp");
    const auto spectral = spectral_blocks(which, space);
    const SectorKind kind =
        which == CachedGenerator::Beamsplitter ? SectorKind::TotalNumber : SectorKind::NumberDifference;
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(spectral->vectors.size());
    for (std::size_t k = 0; k < spectral->vectors.size(); ++k) {
        const ComplexMatrix& v = spectral->vectors[k];
        ComplexVector phases(v.cols());
        for (Eigen::Index j = 0; j < phases.size(); ++j) phases[j] = std::polar(1.0, t * spectral->values[k][j]);
        blocks.push_back(v * phases.asDiagonal() * v.adjoint());
    }
    return BlockOperator(space, kind, std::move(blocks));
}

ComplexVector phase_diagonal(const Eigen::VectorXd& numbers, double angle) {
    ComplexVector out(numbers.size());
    for (Eigen::Index k = 0; k < numbers.size(); ++k) out[k] = std::polar(1.0, angle * numbers[k]);
    return out;
}

}  // namespace

OperatorId operator_for(Param p) {
    switch (p) {
        case Param::Alpha: return OperatorId::DisplacementAlpha;
        case Param::PhiBs: return OperatorId::BeamsplitterPhi;
        case Param::Theta: return OperatorId::RotationTheta;
        case Param::XiAbs: return OperatorId::SqueezerAbs;
        case Param::PhiXi: return OperatorId::SqueezerPhase;
        case Param::BetaAbs: return OperatorId::DisplacementAbs;
        case Param::PhiBeta: return OperatorId::DisplacementPhase;
    }
    throw ConfigError("unknown parameter");
}

BlockOperator displacement_block(double beta_abs, double phi_beta, int mode, const FockSpace& space) {
    const Complex beta = std::polar(beta_abs, phi_beta);
    const ComplexMatrix a = ladder_matrix(space.cutoff());
    const ComplexMatrix gen = beta * a.adjoint() - std::conj(beta) * a;
    // One exponential serves every sector.
    return replicate_local(matrix_exp(gen), mode, space);
}

BlockOperator beamsplitter_block(double phi_bs, const FockSpace& space) {
    return spectral_exp(CachedGenerator::Beamsplitter, phi_bs, space);
}

BlockOperator rotation_block(double theta, int mode, const FockSpace& space) {
    space.require_modes(2, "rotation");
    return BlockOperator::diagonal(space, local_kind(mode), phase_diagonal(occupation(space, mode), theta));
}

BlockOperator two_mode_squeezer_block(double xi_abs, double phi_xi, const FockSpace& space) {
    // S(xi) = P S(|xi|) P^dag with P = exp(i phi_xi (n1 + n2) / 2).
    return spectral_exp(CachedGenerator::SqueezerReal, xi_abs, space)
        .conjugated_by_phases(total_number(space) * (0.5 * phi_xi));
}

OperatorMatrix build_displacement(double beta_abs, double phi_beta, int mode, const FockSpace& space) {
    return displacement_block(beta_abs, phi_beta, mode, space).dense();
}

OperatorMatrix build_beamsplitter(double phi_bs, const FockSpace& space) {
    return beamsplitter_block(phi_bs, space).dense();
}

OperatorMatrix build_rotation(double theta, int mode, const FockSpace& space) {
    if (space.modes() == 1) {
        if (mode != 1) throw ConfigError("single-mode rotation needs mode 1");
        ComplexVector diag(space.dim());
        for (Eigen::Index n = 0; n < space.dim(); ++n) diag[n] = std::polar(1.0, theta * static_cast<double>(n));
        return OperatorMatrix(space, diag.asDiagonal().toDenseMatrix());
    }
    return rotation_block(theta, mode, space).dense();
}

OperatorMatrix build_two_mode_squeezer(double xi_abs, double phi_xi, const FockSpace& space) {
    return two_mode_squeezer_block(xi_abs, phi_xi, space).dense();
}

OperatorMatrix build_unitary(const ParamVector& x, const FockSpace& space) {
    x.validate();
    const OperatorMatrix u = build_displacement(x.beta_abs(), x.phi_beta(), 2, space) *
                             build_two_mode_squeezer(x.xi_abs(), x.phi_xi(), space) *
                             build_rotation(x.theta(), 2, space) * build_beamsplitter(x.phi_bs(), space) *
                             build_displacement(x.alpha(), 0.0, 2, space);
    return u;
}

BlockOperator operator_gradient_block(OperatorId which, const ParamVector& x, const FockSpace& space) {
    space.require_modes(2, "operator_gradient");
    switch (which) {
        case OperatorId::RotationTheta: {
            const Eigen::VectorXd n2 = occupation(space, 2);
            ComplexVector diag = phase_diagonal(n2, x.theta());
            for (Eigen::Index k = 0; k < diag.size(); ++k) diag[k] *= kI * n2[k];
            return BlockOperator::diagonal(space, SectorKind::Mode2Local, diag);
        }
        case OperatorId::BeamsplitterPhi:
            return (beamsplitter_generator(space) * kI) * beamsplitter_block(x.phi_bs(), space);
        case OperatorId::SqueezerAbs: {
            const BlockOperator k = squeezer_generator(Complex(1.0, 0.0), space);
            const BlockOperator s_abs = two_mode_squeezer_block(x.xi_abs(), 0.0, space);
            return (k * s_abs).conjugated_by_phases(total_number(space) * (0.5 * x.phi_xi()));
        }
        case OperatorId::SqueezerPhase:
            return two_mode_squeezer_block(x.xi_abs(), x.phi_xi(), space)
                       .diagonal_commutator(total_number(space)) *
                   Complex(0.0, 0.5);
        case OperatorId::DisplacementAbs: {
            const BlockOperator d_abs = displacement_block(x.beta_abs(), 0.0, 2, space);
            return (quadrature_generator(2, space) * d_abs)
                .conjugated_by_phases(occupation(space, 2) * x.phi_beta());
        }
        case OperatorId::DisplacementPhase:
            return displacement_block(x.beta_abs(), x.phi_beta(), 2, space)
                       .diagonal_commutator(occupation(space, 2)) *
                   kI;
        case OperatorId::DisplacementAlpha:
            return quadrature_generator(2, space) * displacement_block(x.alpha(), 0.0, 2, space);
    }
    throw ConfigError("operator_gradient: unknown operator id");
}

OperatorMatrix operator_gradient(OperatorId which, const ParamVector& x, const FockSpace& space) {
    return operator_gradient_block(which, x, space).dense();
}

OperatorMatrix unitary_gradient(Param p, const ParamVector& x, const FockSpace& space) {
    std::array<OperatorMatrix, 5> factors = {
        build_displacement(x.alpha(), 0.0, 2, space), build_beamsplitter(x.phi_bs(), space),
        build_rotation(x.theta(), 2, space), build_two_mode_squeezer(x.xi_abs(), x.phi_xi(), space),
        build_displacement(x.beta_abs(), x.phi_beta(), 2, space)};
    std::size_t slot = 0;
    switch (p) {
        case Param::Alpha: slot = 0; break;
        case Param::PhiBs: slot = 1; break;
        case Param::Theta: slot = 2; break;
        case Param::XiAbs:
        case Param::PhiXi: slot = 3; break;
        case Param::BetaAbs:
        case Param::PhiBeta: slot = 4; break;
    }
    factors[slot] = operator_gradient(operator_for(p), x, space);
    OperatorMatrix u = factors[4];
    for (std::size_t k = 4; k-- > 0;) u = u * factors[k];
    return u;
}

ProjectedOutput project_and_normalize(const StateVector& psi) {
    const FockSpace& space = psi.space();
    space.require_modes(2, "project_and_normalize");
    const FockSpace out_space = FockSpace::single(space.cutoff());
    if (space.cutoff() < kHeraldPhotons) {
        throw ConfigError("project_and_normalize: cutoff below the heralded photon number");
    }
    const ComplexVector slice = psi.amplitudes().segment(space.index(kHeraldPhotons, 0), space.levels());
    const double probability = slice.squaredNorm();
    if (!std::isfinite(probability)) {
        throw NumericError("project_and_normalize: non-finite amplitudes");
    }
    if (probability < kDegenerateProbability) {
        throw DegenerateProjection("heralding probability " + std::to_string(probability) +
                                   " is numerically zero");
    }
    const double n = std::sqrt(probability);
    return {StateVector(out_space, slice / n), probability, n};
}

Interferometer::Interferometer(const ParamVector& x, const FockSpace& space)
    : space_(space),
      x_([&] {
          x.validate();
          return x;
      }()),
      factors_{displacement_block(x.alpha(), 0.0, 2, space), beamsplitter_block(x.phi_bs(), space),
               rotation_block(x.theta(), 2, space), two_mode_squeezer_block(x.xi_abs(), x.phi_xi(), space),
               displacement_block(x.beta_abs(), x.phi_beta(), 2, space)} {
    if (space.cutoff() < kInputPhotons) {
        throw ConfigError("Interferometer: cutoff must be at least the input photon number");
    }
    stages_[0] = input_state().amplitudes();
    for (std::size_t k = 0; k < kFactors; ++k) {
        stages_[k + 1] = factors_[k].apply(stages_[k]);
    }
}

StateVector Interferometer::input_state() const { return fock_state(space_, kInputPhotons, 0); }

std::array<ComplexVector, kParamCount> Interferometer::output_derivatives() const {
    // Each factor derivative acts on the stage entering that factor; generators
    // commute with their own exponentials, and the phase derivatives are
    // commutators with a diagonal number operator.
    std::array<ComplexVector, kParamCount> out;
    const Eigen::VectorXd n2 = occupation(space_, 2);
    const Eigen::VectorXd n_total = total_number(space_);
    for (Param p : kAllParams) {
        if (x_.is_fixed(p)) continue;
        ComplexVector v;
        std::size_t slot = 0;
        switch (p) {
            case Param::Alpha:
                slot = 0;
                v = quadrature_generator(2, space_).apply(stages_[1]);
                break;
            case Param::PhiBs:
                slot = 1;
                v = kI * beamsplitter_generator(space_).apply(stages_[2]);
                break;
            case Param::Theta:
                slot = 2;
                v = kI * n2.cwiseProduct(stages_[3]);
                break;
            case Param::XiAbs:
                slot = 3;
                v = squeezer_generator(std::polar(1.0, x_.phi_xi()), space_).apply(stages_[4]);
                break;
            case Param::PhiXi: {
                slot = 3;
                const ComplexVector inner = n_total.cwiseProduct(stages_[3]);
                v = Complex(0.0, 0.5) * (n_total.cwiseProduct(stages_[4]) - factors_[3].apply(inner));
                break;
            }
            case Param::BetaAbs:
                slot = 4;
                v = displacement_generator(std::polar(1.0, x_.phi_beta()), 2, space_).apply(stages_[5]);
                break;
            case Param::PhiBeta: {
                slot = 4;
                const ComplexVector inner = n2.cwiseProduct(stages_[4]);
                v = kI * (n2.cwiseProduct(stages_[5]) - factors_[4].apply(inner));
                break;
            }
        }
        for (std::size_t k = slot + 1; k < kFactors; ++k) v = factors_[k].apply(v);
        out[static_cast<std::size_t>(p)] = std::move(v);
    }
    return out;
}

ProjectedOutput Interferometer::heralded() const {
    return project_and_normalize(StateVector(space_, output()));
}

ProjectedOutput heralded_output(const ParamVector& x, const FockSpace& space) {
    return Interferometer(x, space).heralded();
}

GradientBundle projected_state_gradient(const ParamVector& x, const StateVector& target, const FockSpace& space) {
    space.require_modes(2, "projected_state_gradient");
    target.space().require_same(FockSpace::single(space.cutoff()), "projected_state_gradient target");

    const Interferometer circuit(x, space);
    const ProjectedOutput out = circuit.heralded();
    const double n = out.norm_coefficient;
    const Eigen::Index offset = space.index(kHeraldPhotons, 0);
    const Eigen::Index levels = space.levels();
    const ComplexVector projected = circuit.output().segment(offset, levels);

    const ComplexVector& t = target.amplitudes();
    const Complex overlap = out.state.amplitudes().dot(t);  // <psi|T>

    GradientBundle bundle;
    bundle.fidelity = std::norm(overlap);
    bundle.loss = 1.0 - bundle.fidelity;
    bundle.detection_probability = out.detection_probability;
    bundle.norm_coefficient = n;

    const auto derivatives = circuit.output_derivatives();
    for (Param p : kAllParams) {
        const auto i = static_cast<std::size_t>(p);
        if (x.is_fixed(p)) continue;
        const ComplexVector d_projected = derivatives[i].segment(offset, levels);
        const double a_i = 2.0 * projected.dot(d_projected).real();
        const ComplexVector d_psi = d_projected / n - (a_i / (2.0 * n * n * n)) * projected;
        const double g = -2.0 * (overlap * t.dot(d_psi)).real();
        if (!std::isfinite(g)) {
            throw NumericError("projected_state_gradient: non-finite gradient for " +
                               std::string(param_name(p)));
        }
        bundle.grad[i] = g;
    }
    return bundle;
}

double evaluate_fidelity(const ParamVector& x, const StateVector& target, const FockSpace& space) {
    return fidelity(heralded_output(x, space).state, target);
}

}  // namespace cubicgen

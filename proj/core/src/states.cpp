#include "cubicgen/states.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cubicgen/error.hpp"
#include "cubicgen/matrix_exp.hpp"

namespace cubicgen {
namespace {

constexpr int kMaxWorkingCutoff = 800;
constexpr double kWorkingTolerance = 1e-12;

// exp(i t H) v for Hermitian H.
ComplexVector hermitian_exp_apply(const ComplexMatrix& h, double t, const ComplexVector& v) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
    if (eig.info() != Eigen::Success) {
        throw NumericError("eigendecomposition of a Hermitian generator failed");
    }
    const ComplexVector coeffs = eig.eigenvectors().adjoint() * v;
    ComplexVector phased(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        phased[k] = std::polar(1.0, t * eig.eigenvalues()[k]) * coeffs[k];
    }
    return eig.eigenvectors() * phased;
}

ComplexVector cubic_phase_working(double r, double xi_db, int cutoff) {
    const ComplexMatrix a = ladder_matrix(cutoff);
    const ComplexMatrix ad = a.adjoint();
    const double xi = squeezing_from_db(xi_db);
    // S(xi) = exp(i H) with Hermitian H = -i (xi a^2 - xi ad^2) / 2 for real xi.
    const ComplexMatrix squeeze_h = Complex(0.0, -0.5) * xi * (a * a - ad * ad);
    ComplexVector vacuum = ComplexVector::Zero(cutoff + 1);
    vacuum[0] = 1.0;
    const ComplexVector squeezed = xi == 0.0 ? vacuum : hermitian_exp_apply(squeeze_h, 1.0, vacuum);
    if (r == 0.0) {
        return squeezed;
    }
    const ComplexMatrix q = 0.5 * (a + ad);
    const ComplexMatrix q3 = q * q * q;
    return hermitian_exp_apply(q3, r, squeezed);
}

}  // namespace

double squeezing_from_db(double xi_db) { return -std::log(std::pow(10.0, xi_db / 20.0)); }

OperatorMatrix single_mode_squeezer(Complex xi, const FockSpace& space) {
    space.require_modes(1, "single_mode_squeezer");
    const ComplexMatrix a = ladder_matrix(space.cutoff());
    const ComplexMatrix ad = a.adjoint();
    const ComplexMatrix gen = 0.5 * (std::conj(xi) * (a * a) - xi * (ad * ad));
    return OperatorMatrix(space, matrix_exp(gen));
}

OperatorMatrix single_mode_displacement(Complex beta, const FockSpace& space) {
    space.require_modes(1, "single_mode_displacement");
    const ComplexMatrix a = ladder_matrix(space.cutoff());
    const ComplexMatrix gen = beta * a.adjoint() - std::conj(beta) * a;
    return OperatorMatrix(space, matrix_exp(gen));
}

StateVector coherent_state(Complex beta, const FockSpace& space) {
    return single_mode_displacement(beta, space) * fock_state(space, 0);
}

TargetState cubic_phase_target(double r, double xi_db, const FockSpace& space, bool strict) {
    space.require_modes(1, "cubic_phase_target");
    if (!std::isfinite(r) || !std::isfinite(xi_db)) {
        throw ConfigError("cubic_phase_target: non-finite target parameters");
    }
    const int c = space.cutoff();
    const Eigen::Index keep = c + 1;

    int working = std::max(2 * c, c + 60);
    ComplexVector full = cubic_phase_working(r, xi_db, working);
    for (;;) {
        const int next = std::min(kMaxWorkingCutoff, working + std::max(40, working / 3));
        if (next == working) {
            break;
        }
        ComplexVector refined = cubic_phase_working(r, xi_db, next);
        const double change = (refined.head(keep) - full.head(keep)).cwiseAbs().maxCoeff();
        working = next;
        full = std::move(refined);
        if (change < kWorkingTolerance) {
            break;
        }
    }

    const double full_norm2 = full.squaredNorm();
    const double kept_norm2 = full.head(keep).squaredNorm();
    ComplexVector kept = full.head(keep) / std::sqrt(kept_norm2);

    const int tail_start = c - std::max(0, (c + 1) / 10 - 1);
    const double tail = kept.tail(keep - tail_start).squaredNorm();

    TargetState out{StateVector(space, std::move(kept)), tail,
                    std::max(0.0, 1.0 - kept_norm2 / full_norm2), working};
    if (strict && tail >= kTailMassWarning) {
        std::ostringstream msg;
        msg << "cubic_phase_target(r=" << r << ", xi_dB=" << xi_db << "): tail mass " << tail
            << " in the top Fock levels at cutoff " << c << "; increase the cutoff";
        throw NumericError(msg.str());
    }
    return out;
}

}  // namespace cubicgen

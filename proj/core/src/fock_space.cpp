#include "cubicgen/fock_space.hpp"

#include <cmath>
#include <string>

#include "cubicgen/error.hpp"

namespace cubicgen {

FockSpace::FockSpace(int cutoff, int modes) : cutoff_(cutoff), modes_(modes) {
    if (cutoff < 1) {
        throw ConfigError("FockSpace: cutoff must be >= 1, got " + std::to_string(cutoff));
    }
    if (modes != 1 && modes != 2) {
        throw ConfigError("FockSpace: modes must be 1 or 2, got " + std::to_string(modes));
    }
}

Eigen::Index FockSpace::dim() const {
    const Eigen::Index d = levels();
    return modes_ == 1 ? d : d * d;
}

Eigen::Index FockSpace::index(int n1) const {
    require_modes(1, "FockSpace::index");
    if (n1 < 0 || n1 > cutoff_) {
        throw ConfigError("occupation " + std::to_string(n1) + " exceeds cutoff " +
                          std::to_string(cutoff_));
    }
    return n1;
}

Eigen::Index FockSpace::index(int n1, int n2) const {
    require_modes(2, "FockSpace::index");
    if (n1 < 0 || n1 > cutoff_ || n2 < 0 || n2 > cutoff_) {
        throw ConfigError("occupation (" + std::to_string(n1) + "," + std::to_string(n2) +
                          ") exceeds cutoff " + std::to_string(cutoff_));
    }
    return static_cast<Eigen::Index>(n1) * levels() + n2;
}

void FockSpace::require_same(const FockSpace& other, const char* context) const {
    if (*this != other) {
        throw ConfigError(std::string(context) + ": Fock space mismatch (cutoff " +
                          std::to_string(cutoff_) + "/" + std::to_string(modes_) +
                          " modes vs cutoff " + std::to_string(other.cutoff_) + "/" +
                          std::to_string(other.modes_) + " modes)");
    }
}

void FockSpace::require_modes(int modes, const char* context) const {
    if (modes_ != modes) {
        throw ConfigError(std::string(context) + ": expected a " + std::to_string(modes) +
                          "-mode space, got " + std::to_string(modes_));
    }
}

StateVector::StateVector(FockSpace space, ComplexVector amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != space_.dim()) {
        throw ConfigError("StateVector: amplitude count " + std::to_string(amplitudes_.size()) +
                          " does not match space dimension " + std::to_string(space_.dim()));
    }
}

StateVector StateVector::normalized() const {
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw NumericError("StateVector::normalized: zero or non-finite norm");
    }
    return StateVector(space_, amplitudes_ / n);
}

Complex StateVector::inner(const StateVector& other) const {
    space_.require_same(other.space_, "StateVector::inner");
    return amplitudes_.dot(other.amplitudes_);
}

OperatorMatrix::OperatorMatrix(FockSpace space, ComplexMatrix entries)
    : space_(space), entries_(std::move(entries)) {
    if (entries_.rows() != space_.dim() || entries_.cols() != space_.dim()) {
        throw ConfigError("OperatorMatrix: shape " + std::to_string(entries_.rows()) + "x" +
                          std::to_string(entries_.cols()) + " does not match space dimension " +
                          std::to_string(space_.dim()));
    }
}

OperatorMatrix OperatorMatrix::identity(const FockSpace& space) {
    return OperatorMatrix(space, ComplexMatrix::Identity(space.dim(), space.dim()));
}

OperatorMatrix OperatorMatrix::zero(const FockSpace& space) {
    return OperatorMatrix(space, ComplexMatrix::Zero(space.dim(), space.dim()));
}

OperatorMatrix OperatorMatrix::adjoint() const { return OperatorMatrix(space_, entries_.adjoint()); }

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& rhs) const {
    space_.require_same(rhs.space_, "OperatorMatrix::operator*");
    return OperatorMatrix(space_, entries_ * rhs.entries_);
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& rhs) const {
    space_.require_same(rhs.space_, "OperatorMatrix::operator+");
    return OperatorMatrix(space_, entries_ + rhs.entries_);
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& rhs) const {
    space_.require_same(rhs.space_, "OperatorMatrix::operator-");
    return OperatorMatrix(space_, entries_ - rhs.entries_);
}

OperatorMatrix OperatorMatrix::operator*(Complex scale) const {
    return OperatorMatrix(space_, entries_ * scale);
}

StateVector OperatorMatrix::operator*(const StateVector& state) const {
    space_.require_same(state.space(), "OperatorMatrix * StateVector");
    return StateVector(space_, entries_ * state.amplitudes());
}

double OperatorMatrix::max_abs() const { return entries_.cwiseAbs().maxCoeff(); }

ComplexMatrix ladder_matrix(int cutoff) {
    const Eigen::Index d = cutoff + 1;
    ComplexMatrix a = ComplexMatrix::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

namespace {

ComplexMatrix embed(const FockSpace& space, const ComplexMatrix& single, int mode) {
    if (mode < 1 || mode > space.modes()) {
        throw ConfigError("mode " + std::to_string(mode) + " is not valid for a " +
                          std::to_string(space.modes()) + "-mode space");
    }
    if (space.modes() == 1) {
        return single;
    }
    const Eigen::Index d = space.levels();
    ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const Complex v = single(i, j);
            if (v == Complex{}) {
                continue;
            }
            for (Eigen::Index k = 0; k < d; ++k) {
                if (mode == 1) {
                    out(i * d + k, j * d + k) = v;
                } else {
                    out(k * d + i, k * d + j) = v;
                }
            }
        }
    }
    return out;
}

}  // namespace

OperatorMatrix annihilator(const FockSpace& space, int mode) {
    return OperatorMatrix(space, embed(space, ladder_matrix(space.cutoff()), mode));
}

OperatorMatrix creator(const FockSpace& space, int mode) {
    return OperatorMatrix(space, embed(space, ladder_matrix(space.cutoff()).adjoint(), mode));
}

OperatorMatrix number_operator(const FockSpace& space, int mode) {
    const Eigen::Index d = space.levels();
    ComplexMatrix n = ComplexMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        n(k, k) = static_cast<double>(k);
    }
    return OperatorMatrix(space, embed(space, n, mode));
}

OperatorMatrix position_operator(const FockSpace& space) {
    space.require_modes(1, "position_operator");
    const ComplexMatrix a = ladder_matrix(space.cutoff());
    return OperatorMatrix(space, 0.5 * (a + a.adjoint()));
}

StateVector fock_state(const FockSpace& space, int n1, std::optional<int> n2) {
    ComplexVector amps = ComplexVector::Zero(space.dim());
    if (space.modes() == 1) {
        if (n2) {
            throw ConfigError("fock_state: second occupation given for a single-mode space");
        }
        amps[space.index(n1)] = 1.0;
    } else {
        if (!n2) {
            throw ConfigError("fock_state: two-mode space needs both occupations");
        }
        amps[space.index(n1, *n2)] = 1.0;
    }
    return StateVector(space, std::move(amps));
}

double fidelity(const StateVector& a, const StateVector& b) { return std::norm(a.inner(b)); }

}  // namespace cubicgen

#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace cubicgen {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Truncated Fock basis for one or two bosonic modes. Each mode keeps levels
// 0..cutoff. Two-mode basis index is n1 * (cutoff + 1) + n2 (mode 1 major).
class FockSpace {
public:
    FockSpace(int cutoff, int modes);

    static FockSpace single(int cutoff) { return FockSpace(cutoff, 1); }
    static FockSpace two_mode(int cutoff) { return FockSpace(cutoff, 2); }

    int cutoff() const { return cutoff_; }
    int modes() const { return modes_; }
    int levels() const { return cutoff_ + 1; }
    Eigen::Index dim() const;

    Eigen::Index index(int n1) const;
    Eigen::Index index(int n1, int n2) const;

    // Throws ConfigError when dimensions differ.
    void require_same(const FockSpace& other, const char* context) const;
    void require_modes(int modes, const char* context) const;

    friend bool operator==(const FockSpace&, const FockSpace&) = default;

private:
    int cutoff_;
    int modes_;
};

class StateVector {
public:
    StateVector(FockSpace space, ComplexVector amplitudes);

    const FockSpace& space() const { return space_; }
    const ComplexVector& amplitudes() const { return amplitudes_; }
    Complex operator[](Eigen::Index i) const { return amplitudes_[i]; }

    double norm() const { return amplitudes_.norm(); }
    StateVector normalized() const;

    // <this|other>, conjugate-linear in this.
    Complex inner(const StateVector& other) const;

private:
    FockSpace space_;
    ComplexVector amplitudes_;
};

class OperatorMatrix {
public:
    OperatorMatrix(FockSpace space, ComplexMatrix entries);

    static OperatorMatrix identity(const FockSpace& space);
    static OperatorMatrix zero(const FockSpace& space);

    const FockSpace& space() const { return space_; }
    const ComplexMatrix& entries() const { return entries_; }
    Complex operator()(Eigen::Index row, Eigen::Index col) const { return entries_(row, col); }

    OperatorMatrix adjoint() const;
    OperatorMatrix operator*(const OperatorMatrix& rhs) const;
    OperatorMatrix operator+(const OperatorMatrix& rhs) const;
    OperatorMatrix operator-(const OperatorMatrix& rhs) const;
    OperatorMatrix operator*(Complex scale) const;
    StateVector operator*(const StateVector& state) const;

    double max_abs() const;

private:
    FockSpace space_;
    ComplexMatrix entries_;
};

// Ladder operators. `mode` is 1-based; for two-mode spaces the operator is
// tensored with the identity on the other mode.
OperatorMatrix annihilator(const FockSpace& space, int mode);
OperatorMatrix creator(const FockSpace& space, int mode);
OperatorMatrix number_operator(const FockSpace& space, int mode);
// Coordinate quadrature q = (a + a^dagger) / 2 of a single-mode space.
OperatorMatrix position_operator(const FockSpace& space);

// Single-mode d x d annihilation matrix with d = cutoff + 1.
ComplexMatrix ladder_matrix(int cutoff);

StateVector fock_state(const FockSpace& space, int n1, std::optional<int> n2 = std::nullopt);

// Squared overlap |<a|b>|^2 of two pure states.
double fidelity(const StateVector& a, const StateVector& b);

}  // namespace cubicgen

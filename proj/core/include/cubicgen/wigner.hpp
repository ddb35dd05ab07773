#pragma once

#include <span>
#include <vector>

#include "cubicgen/fock_space.hpp"

namespace cubicgen {

// W(q, p) sampled on a rectangular grid; values(i, j) is W(q_axis[i], p_axis[j]).
struct WignerGrid {
    std::vector<double> q_axis;
    std::vector<double> p_axis;
    Eigen::MatrixXd values;

    // Trapezoidal integral over the grid.
    double integral() const;
    // Trapezoidal integral over p for every q.
    std::vector<double> q_marginal() const;
    double min_value() const { return values.minCoeff(); }
};

// Wigner function of a single-mode pure state, in the phase-space convention
// of q = (a + a^dagger)/2, p = (a - a^dagger)/(2i); vacuum is
// (2/pi) exp(-2(q^2 + p^2)). Evaluated as the Laguerre-function expansion of
// the displaced parity, with the basis functions built by a three-term
// recursion that stays stable far from the origin.
WignerGrid wigner(const StateVector& state, std::span<const double> q_axis, std::span<const double> p_axis);

double wigner_at(const StateVector& state, double q, double p);

std::vector<double> linspace(double lo, double hi, int points);

}  // namespace cubicgen

#pragma once

#include "cubicgen/fock_space.hpp"

namespace cubicgen {

// Squeezing parameter from a squeezing degree in dB: -ln(10^(dB/20)).
// Negative for positive dB.
double squeezing_from_db(double xi_db);

// Single-mode squeezer exp((xi* a^2 - xi a^dagger^2) / 2) on a single-mode space.
OperatorMatrix single_mode_squeezer(Complex xi, const FockSpace& space);

// exp(beta a^dagger - beta* a) on a single-mode space.
OperatorMatrix single_mode_displacement(Complex beta, const FockSpace& space);

StateVector coherent_state(Complex beta, const FockSpace& space);

struct TargetState {
    StateVector state;
    // Probability mass in the highest 10% of retained Fock levels.
    double tail_mass = 0.0;
    // Probability mass of the untruncated state above the cutoff.
    double truncated_mass = 0.0;
    // Cutoff of the enlarged space the state was computed in.
    int working_cutoff = 0;
};

inline constexpr double kTailMassWarning = 1e-6;

// Cubic phase state exp(i r q^3) S(xi_T)|0> with q = (a + a^dagger)/2 and
// xi_T = squeezing_from_db(xi_db).
//
// Both exponentials are evaluated in an enlarged working space whose size is
// increased until the retained amplitudes stop changing (1e-12), then the
// state is cut to `space` and renormalized. With `strict`, a tail mass of
// kTailMassWarning or more throws NumericError.
TargetState cubic_phase_target(double r, double xi_db, const FockSpace& space, bool strict = false);

}  // namespace cubicgen

#pragma once

#include "scarforge/fock.hpp"

namespace scarforge::husimi {

// Husimi measure of the phase-space box |x| <= b, |xi| <= b for a number-basis state.
// The disk |z| <= b / sqrt(2 hbar) is integrated in closed form (incomplete gamma);
// the corners use a polar grid with exact Fourier integration over the angular arcs.
double fock_box_mass(const fock::FockState& state, double halfwidth);

}  // namespace scarforge::husimi

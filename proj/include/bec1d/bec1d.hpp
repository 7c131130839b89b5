#pragma once

// Umbrella header: ground states, variational and Thomas-Fermi
// approximations, and time propagation for the effective 1D
// Gross-Pitaevskii model with harmonic trapping.

#include "bec1d/model.hpp"
#include "bec1d/grid.hpp"
#include "bec1d/wavefunction.hpp"
#include "bec1d/operators.hpp"
#include "bec1d/functionals.hpp"
#include "bec1d/quadrature.hpp"
#include "bec1d/ground_state.hpp"
#include "bec1d/variational.hpp"
#include "bec1d/thomas_fermi.hpp"
#include "bec1d/dynamics.hpp"
#include "bec1d/io.hpp"

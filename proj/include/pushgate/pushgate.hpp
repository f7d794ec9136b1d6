#pragma once

// Umbrella header.

#include "pushgate/constants.hpp"
#include "pushgate/dipole_force.hpp"
#include "pushgate/gate_algebra.hpp"
#include "pushgate/parallel.hpp"
#include "pushgate/phase_engine.hpp"
#include "pushgate/rng.hpp"
#include "pushgate/scenario.hpp"
#include "pushgate/stability.hpp"
#include "pushgate/thermal_nonuniform.hpp"
#include "pushgate/trap_dynamics.hpp"

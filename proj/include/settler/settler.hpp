#pragma once

#include "settler/constitutive.hpp"
#include "settler/csv.hpp"
#include "settler/fluxes.hpp"
#include "settler/grid.hpp"
#include "settler/harness.hpp"
#include "settler/methodxp.hpp"
#include "settler/mol.hpp"
#include "settler/numerics.hpp"
#include "settler/reactions.hpp"
#include "settler/scenario.hpp"
#include "settler/scenario_io.hpp"
#include "settler/schedule.hpp"
#include "settler/state.hpp"
#include "settler/stepper.hpp"

#pragma once

#include "cavitydyn/fluid/checkpoint.hpp"
#include "cavitydyn/fluid/fluid_solver.hpp"
#include "cavitydyn/fluid/functionals.hpp"
#include "cavitydyn/fluid/initial_conditions.hpp"
#include "cavitydyn/fluid/mac_grid.hpp"
#include "cavitydyn/fluid/operators.hpp"
#include "cavitydyn/fluid/pressure_solver.hpp"

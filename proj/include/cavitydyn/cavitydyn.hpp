#pragma once

#include "cavitydyn/asymptotics.hpp"
#include "cavitydyn/config.hpp"
#include "cavitydyn/coupling.hpp"
#include "cavitydyn/diagnostics.hpp"
#include "cavitydyn/fluid.hpp"
#include "cavitydyn/geometry.hpp"
#include "cavitydyn/simulation.hpp"
#include "cavitydyn/verification.hpp"

#pragma once

#include "hslimit/error.hpp"
#include "hslimit/grid.hpp"
#include "hslimit/model.hpp"
#include "hslimit/potentials.hpp"
#include "hslimit/pressure.hpp"
#include "hslimit/quadrature.hpp"
#include "hslimit/rates.hpp"
#include "hslimit/solver.hpp"
#include "hslimit/stationary.hpp"
#include "hslimit/transport.hpp"

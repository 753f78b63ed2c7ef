#pragma once

#include "toleq/numeric.hpp"
#include "toleq/game.hpp"
#include "toleq/tolerance.hpp"
#include "toleq/equilibrium.hpp"
#include "toleq/dilemmas.hpp"
#include "toleq/pd_tolerant.hpp"
#include "toleq/io.hpp"

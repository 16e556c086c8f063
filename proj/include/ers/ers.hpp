#pragma once

#include "ers/dst1d.hpp"
#include "ers/error.hpp"
#include "ers/gaussian_ers.hpp"
#include "ers/haar.hpp"
#include "ers/oracle.hpp"
#include "ers/poisson2d.hpp"
#include "ers/randomness.hpp"
#include "ers/rational.hpp"
#include "ers/samplers.hpp"
#include "ers/sketch.hpp"
#include "ers/stats.hpp"
#include "ers/universe.hpp"

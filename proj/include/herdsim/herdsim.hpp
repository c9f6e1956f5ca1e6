#pragma once

#include "herdsim/analysis.hpp"
#include "herdsim/config.hpp"
#include "herdsim/dynamics.hpp"
#include "herdsim/errors.hpp"
#include "herdsim/graph.hpp"
#include "herdsim/io.hpp"
#include "herdsim/montecarlo.hpp"
#include "herdsim/rng.hpp"
#include "herdsim/stats.hpp"
#include "herdsim/version.hpp"

#pragma once

#include "acquisition.hpp"
#include "algorithms.hpp"
#include "benchmarks.hpp"
#include "clock.hpp"
#include "error.hpp"
#include "gp.hpp"
#include "gp_fit.hpp"
#include "harness.hpp"
#include "kernels.hpp"
#include "numeric.hpp"
#include "objective.hpp"
#include "qmc.hpp"
#include "relevancy.hpp"
#include "replay.hpp"
#include "response_time.hpp"
#include "stats.hpp"
#include "theory.hpp"

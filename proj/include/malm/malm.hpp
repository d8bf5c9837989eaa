#pragma once

#include "malm/config.hpp"
#include "malm/linalg.hpp"
#include "malm/metrics.hpp"
#include "malm/problem.hpp"
#include "malm/problem_io.hpp"
#include "malm/rng.hpp"
#include "malm/schedule.hpp"
#include "malm/solver.hpp"
#include "malm/svg.hpp"
#include "malm/verify.hpp"

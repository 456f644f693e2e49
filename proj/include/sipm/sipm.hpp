#pragma once

#include "sipm/error.hpp"
#include "sipm/bounds.hpp"
#include "sipm/barrier.hpp"
#include "sipm/schedules.hpp"
#include "sipm/step_size.hpp"
#include "sipm/libsvm.hpp"
#include "sipm/problems.hpp"
#include "sipm/solver.hpp"
#include "sipm/baselines.hpp"
#include "sipm/harness.hpp"

#pragma once

#include "wass1/bench.hpp"
#include "wass1/directions.hpp"
#include "wass1/error.hpp"
#include "wass1/histogram.hpp"
#include "wass1/network.hpp"
#include "wass1/network_simplex.hpp"
#include "wass1/shortest_path.hpp"
#include "wass1/solution.hpp"
#include "wass1/ssp.hpp"
#include "wass1/wasserstein.hpp"

#pragma once

#include "ppr/decomposition.hpp"
#include "ppr/evaluation.hpp"
#include "ppr/graph.hpp"
#include "ppr/index.hpp"
#include "ppr/monte_carlo.hpp"
#include "ppr/parallel.hpp"
#include "ppr/rng.hpp"
#include "ppr/sparse_vector.hpp"

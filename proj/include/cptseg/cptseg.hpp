#pragma once

// Changepoint segmentation toolkit: parametric segment models, penalized
// objective functions, and search algorithms over a shared result type.

#include "cptseg/algorithms.hpp"
#include "cptseg/core.hpp"
#include "cptseg/csv.hpp"
#include "cptseg/ga.hpp"
#include "cptseg/json_io.hpp"
#include "cptseg/models.hpp"
#include "cptseg/nhpp.hpp"
#include "cptseg/penalties.hpp"
#include "cptseg/rng.hpp"
#include "cptseg/search.hpp"
#include "cptseg/simulate.hpp"
#include "cptseg/svg.hpp"
#include "cptseg/toml.hpp"
#include "cptseg/types.hpp"

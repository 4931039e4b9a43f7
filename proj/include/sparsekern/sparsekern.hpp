#pragma once

#include "sparsekern/csv.hpp"
#include "sparsekern/degree.hpp"
#include "sparsekern/error.hpp"
#include "sparsekern/experiments.hpp"
#include "sparsekern/feature_map.hpp"
#include "sparsekern/kernels.hpp"
#include "sparsekern/nonlinearity.hpp"
#include "sparsekern/parallel.hpp"
#include "sparsekern/regression.hpp"
#include "sparsekern/rng.hpp"
#include "sparsekern/version.hpp"
#include "sparsekern/weight_law.hpp"

#pragma once

#include "mixlab/complex_rpf.hpp"
#include "mixlab/csv.hpp"
#include "mixlab/dolgopyat.hpp"
#include "mixlab/errors.hpp"
#include "mixlab/function_space.hpp"
#include "mixlab/grid.hpp"
#include "mixlab/markov_model.hpp"
#include "mixlab/model_config.hpp"
#include "mixlab/orbit_counting.hpp"
#include "mixlab/parallel.hpp"
#include "mixlab/scales_uni.hpp"
#include "mixlab/thermo.hpp"
#include "mixlab/transfer.hpp"

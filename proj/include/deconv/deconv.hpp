#pragma once

#include "config.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "filter.hpp"
#include "initial_data.hpp"
#include "io.hpp"
#include "operators.hpp"
#include "solver.hpp"
#include "spectral_field.hpp"
#include "verify.hpp"
#include "wave_grid.hpp"

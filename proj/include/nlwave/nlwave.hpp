#pragma once

// Umbrella header for the nonlocal wave-equation laboratory.

#include "diagnostics.hpp"
#include "grid.hpp"
#include "kernels.hpp"
#include "series.hpp"
#include "specfun.hpp"
#include "spectral.hpp"

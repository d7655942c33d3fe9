#pragma once

// Umbrella header for the curvature-capacity flow toolkit.

#include "capflow/cyclic_tridiagonal.hpp"
#include "capflow/emit.hpp"
#include "capflow/errors.hpp"
#include "capflow/flow.hpp"
#include "capflow/manifest.hpp"
#include "capflow/polar_curve.hpp"
#include "capflow/potential.hpp"
#include "capflow/radial.hpp"
#include "capflow/verify.hpp"

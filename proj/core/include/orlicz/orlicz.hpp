#pragma once

#include "orlicz/config.hpp"
#include "orlicz/convex_transforms.hpp"
#include "orlicz/error.hpp"
#include "orlicz/generators.hpp"
#include "orlicz/grid_function.hpp"
#include "orlicz/io.hpp"
#include "orlicz/martingales.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/numeric.hpp"
#include "orlicz/operators.hpp"
#include "orlicz/psi_catalog.hpp"
#include "orlicz/psi_spec.hpp"
#include "orlicz/rng.hpp"
#include "orlicz/sample.hpp"
#include "orlicz/slowly_varying.hpp"

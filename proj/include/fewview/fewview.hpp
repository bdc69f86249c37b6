#pragma once

// Umbrella header.

#include "grid.hpp"
#include "phantom.hpp"
#include "io.hpp"
#include "png.hpp"
#include "projector.hpp"
#include "fbp.hpp"
#include "tv.hpp"
#include "rls.hpp"
#include "metrics.hpp"
#include "experiment.hpp"
#include "report.hpp"

#pragma once

// Umbrella header.

#include "mwarp/classification.hpp"
#include "mwarp/error.hpp"
#include "mwarp/geometry.hpp"
#include "mwarp/graph.hpp"
#include "mwarp/intrinsic.hpp"
#include "mwarp/matrix.hpp"
#include "mwarp/panel.hpp"
#include "mwarp/parallel.hpp"
#include "mwarp/random.hpp"
#include "mwarp/warping.hpp"

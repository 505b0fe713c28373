#pragma once

// Umbrella header for the whole library.

#include "minplus/apsp.hpp"
#include "minplus/characteristics.hpp"
#include "minplus/convolution.hpp"
#include "minplus/covering.hpp"
#include "minplus/graph.hpp"
#include "minplus/instance.hpp"
#include "minplus/matrix.hpp"
#include "minplus/minmax.hpp"
#include "minplus/numeric.hpp"
#include "minplus/product.hpp"

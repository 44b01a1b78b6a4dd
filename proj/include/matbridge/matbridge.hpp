#pragma once

// Umbrella header: the full material-design to product-design pipeline.

#include "matbridge/dataset.hpp"
#include "matbridge/errors.hpp"
#include "matbridge/linalg.hpp"
#include "matbridge/metrics.hpp"
#include "matbridge/model_io.hpp"
#include "matbridge/network.hpp"
#include "matbridge/normalize.hpp"
#include "matbridge/plot.hpp"
#include "matbridge/rng.hpp"
#include "matbridge/schema.hpp"
#include "matbridge/split.hpp"
#include "matbridge/surrogate.hpp"
#include "matbridge/text.hpp"
#include "matbridge/training.hpp"
#include "matbridge/transfer.hpp"

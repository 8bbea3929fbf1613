#pragma once

// Umbrella header.

#include "silver/data_io.hpp"
#include "silver/embedding.hpp"
#include "silver/errors.hpp"
#include "silver/experiments.hpp"
#include "silver/matrix.hpp"
#include "silver/numeric.hpp"
#include "silver/plot_data.hpp"
#include "silver/report.hpp"
#include "silver/rng.hpp"
#include "silver/stats.hpp"
#include "silver/text_metrics.hpp"
#include "silver/version.hpp"

#pragma once

// Umbrella header for the pairs-trading research engine.

#include "pairs/error.hpp"
#include "pairs/date.hpp"
#include "pairs/csv.hpp"
#include "pairs/random.hpp"
#include "pairs/grid.hpp"
#include "pairs/market_data.hpp"
#include "pairs/pair_selection.hpp"
#include "pairs/mackinnon.hpp"
#include "pairs/stat_tests.hpp"
#include "pairs/ou_model.hpp"
#include "pairs/strategy.hpp"
#include "pairs/backtest.hpp"
#include "pairs/metrics.hpp"
#include "pairs/report.hpp"
#include "pairs/config.hpp"
#include "pairs/pipeline.hpp"

#pragma once

#include "cpinfer/bench.hpp"
#include "cpinfer/errors.hpp"
#include "cpinfer/grid.hpp"
#include "cpinfer/io.hpp"
#include "cpinfer/localize.hpp"
#include "cpinfer/scale.hpp"
#include "cpinfer/search.hpp"
#include "cpinfer/series.hpp"
#include "cpinfer/simulate.hpp"
#include "cpinfer/thresholds.hpp"

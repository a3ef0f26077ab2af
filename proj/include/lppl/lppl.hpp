#pragma once

#include "lppl/calibration.hpp"
#include "lppl/error.hpp"
#include "lppl/model.hpp"
#include "lppl/quantile.hpp"
#include "lppl/scanner.hpp"
#include "lppl/serialize.hpp"
#include "lppl/simplex.hpp"
#include "lppl/synth.hpp"
#include "lppl/timeseries.hpp"

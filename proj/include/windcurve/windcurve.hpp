#pragma once

#include "windcurve/arx.hpp"
#include "windcurve/autowp.hpp"
#include "windcurve/backtest.hpp"
#include "windcurve/csv.hpp"
#include "windcurve/curves.hpp"
#include "windcurve/dataset.hpp"
#include "windcurve/error.hpp"
#include "windcurve/height.hpp"
#include "windcurve/lof.hpp"
#include "windcurve/mask.hpp"
#include "windcurve/metrics.hpp"
#include "windcurve/mlp.hpp"
#include "windcurve/models.hpp"
#include "windcurve/nnls.hpp"
#include "windcurve/postprocess.hpp"
#include "windcurve/series.hpp"
#include "windcurve/shutdown.hpp"
#include "windcurve/synthgen.hpp"
#include "windcurve/time.hpp"

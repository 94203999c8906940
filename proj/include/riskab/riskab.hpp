#pragma once
// Umbrella header for the riskab library (everything except the CLI).

#include "riskab/agent.hpp"
#include "riskab/analysis.hpp"
#include "riskab/config.hpp"
#include "riskab/environment.hpp"
#include "riskab/errors.hpp"
#include "riskab/geometry.hpp"
#include "riskab/io.hpp"
#include "riskab/mathutil.hpp"
#include "riskab/rng.hpp"
#include "riskab/simulate.hpp"

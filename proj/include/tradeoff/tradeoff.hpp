#pragma once

#include "tradeoff/numerics.hpp"
#include "tradeoff/losses.hpp"
#include "tradeoff/models.hpp"
#include "tradeoff/distributions.hpp"
#include "tradeoff/geometry.hpp"
#include "tradeoff/risk.hpp"
#include "tradeoff/ridge_analysis.hpp"
#include "tradeoff/training.hpp"
#include "tradeoff/oracles.hpp"
#include "tradeoff/report.hpp"

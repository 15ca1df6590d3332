#pragma once

#include "mel/discrete_measure.hpp"
#include "mel/divergences.hpp"
#include "mel/entropy.hpp"
#include "mel/estimators.hpp"
#include "mel/hard_instances.hpp"
#include "mel/io.hpp"
#include "mel/metric.hpp"
#include "mel/models.hpp"
#include "mel/risk_lab.hpp"
#include "mel/rng.hpp"
#include "mel/version.hpp"

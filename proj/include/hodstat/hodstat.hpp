#pragma once

#include "hodstat/decision.hpp"
#include "hodstat/engine.hpp"
#include "hodstat/knowledge.hpp"
#include "hodstat/metrics.hpp"
#include "hodstat/mobility.hpp"
#include "hodstat/radio.hpp"
#include "hodstat/rng.hpp"
#include "hodstat/scenario.hpp"
#include "hodstat/types.hpp"

#pragma once

// Convenience umbrella for the whole library.

#include "entsim/coincidence.hpp"
#include "entsim/measure.hpp"
#include "entsim/optics.hpp"
#include "entsim/qstate.hpp"
#include "entsim/rng.hpp"
#include "entsim/scenario.hpp"

#pragma once

#include "hetcell/analytics.hpp"
#include "hetcell/association.hpp"
#include "hetcell/config.hpp"
#include "hetcell/error.hpp"
#include "hetcell/fading.hpp"
#include "hetcell/geometry.hpp"
#include "hetcell/pointprocess.hpp"
#include "hetcell/random.hpp"
#include "hetcell/report.hpp"
#include "hetcell/stats.hpp"
#include "hetcell/sweep.hpp"
#include "hetcell/tessellation.hpp"
#include "hetcell/tier.hpp"
#include "hetcell/validate.hpp"

#pragma once

#include "weakfactor/error.hpp"
#include "weakfactor/random.hpp"
#include "weakfactor/stable.hpp"
#include "weakfactor/processes.hpp"
#include "weakfactor/spectra.hpp"
#include "weakfactor/estimators.hpp"
#include "weakfactor/parallel.hpp"
#include "weakfactor/montecarlo.hpp"
#include "weakfactor/empirical_bounds.hpp"
#include "weakfactor/config_io.hpp"
#include "weakfactor/presets.hpp"
#include "weakfactor/csv.hpp"

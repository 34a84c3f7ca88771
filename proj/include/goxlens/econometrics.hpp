#pragma once

#include "goxlens/econometrics/adf.hpp"
#include "goxlens/econometrics/critical_values.hpp"
#include "goxlens/econometrics/distributions.hpp"
#include "goxlens/econometrics/engle_granger.hpp"
#include "goxlens/econometrics/irf.hpp"
#include "goxlens/econometrics/johansen.hpp"
#include "goxlens/econometrics/ols.hpp"
#include "goxlens/econometrics/var.hpp"

#pragma once

#include "goxlens/ml/ensemble.hpp"
#include "goxlens/ml/importance.hpp"
#include "goxlens/ml/lagged.hpp"
#include "goxlens/ml/parallel.hpp"
#include "goxlens/ml/rnn.hpp"
#include "goxlens/ml/tree.hpp"

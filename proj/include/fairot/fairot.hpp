#pragma once

#include "fairot/distributions.hpp"
#include "fairot/error.hpp"
#include "fairot/io.hpp"
#include "fairot/metrics.hpp"
#include "fairot/projection.hpp"
#include "fairot/random.hpp"
#include "fairot/regressors.hpp"
#include "fairot/synth.hpp"
#include "fairot/transport.hpp"

// Umbrella header pulling in the whole library.
#pragma once

#include "udsim/channels.hpp"
#include "udsim/cli.hpp"
#include "udsim/core.hpp"
#include "udsim/dilation.hpp"
#include "udsim/discrimination.hpp"
#include "udsim/experiments.hpp"
#include "udsim/hilbert.hpp"
#include "udsim/linalg.hpp"
#include "udsim/metrics.hpp"
#include "udsim/noisesim.hpp"
#include "udsim/rng.hpp"
#include "udsim/serialization.hpp"

#pragma once

#include "hygen/error.hpp"
#include "hygen/expected.hpp"
#include "hygen/hypergraph.hpp"
#include "hygen/io.hpp"
#include "hygen/matcher.hpp"
#include "hygen/mcmc.hpp"
#include "hygen/metrics.hpp"
#include "hygen/model.hpp"
#include "hygen/pipeline.hpp"
#include "hygen/queue.hpp"
#include "hygen/rng.hpp"
#include "hygen/sequences.hpp"
#include "hygen/weights.hpp"

#pragma once

#include "bbsp/analysis.hpp"
#include "bbsp/bbsp_sim.hpp"
#include "bbsp/chameleon.hpp"
#include "bbsp/error.hpp"
#include "bbsp/event_stream.hpp"
#include "bbsp/graph.hpp"
#include "bbsp/mabb.hpp"
#include "bbsp/meeting.hpp"
#include "bbsp/parallel.hpp"
#include "bbsp/rng.hpp"
#include "bbsp/split_kernel.hpp"
#include "bbsp/state_space.hpp"

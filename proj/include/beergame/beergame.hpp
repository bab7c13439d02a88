#pragma once

// Everything except the HTTP transport (beergame/http_transport.hpp).

#include "beergame/analysis.hpp"
#include "beergame/config.hpp"
#include "beergame/errors.hpp"
#include "beergame/experiment.hpp"
#include "beergame/game.hpp"
#include "beergame/gateway.hpp"
#include "beergame/observation.hpp"
#include "beergame/order_parser.hpp"
#include "beergame/plan.hpp"
#include "beergame/policies.hpp"
#include "beergame/prompts.hpp"
#include "beergame/rational.hpp"
#include "beergame/report.hpp"
#include "beergame/rng.hpp"
#include "beergame/sim.hpp"
#include "beergame/stats.hpp"
#include "beergame/trace_io.hpp"
#include "beergame/transcript.hpp"

#pragma once

// Umbrella header for the PRSP RDF stream processing framework.

#include "prsp/bench.hpp"
#include "prsp/csparql.hpp"
#include "prsp/engine.hpp"
#include "prsp/error.hpp"
#include "prsp/external_engine.hpp"
#include "prsp/graph.hpp"
#include "prsp/ntriples.hpp"
#include "prsp/query.hpp"
#include "prsp/runtime.hpp"
#include "prsp/solution.hpp"
#include "prsp/stream.hpp"
#include "prsp/term.hpp"
#include "prsp/window.hpp"

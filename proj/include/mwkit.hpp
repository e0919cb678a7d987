#pragma once

#include "mwkit/attractor.hpp"
#include "mwkit/config.hpp"
#include "mwkit/conjugacy.hpp"
#include "mwkit/correspondence.hpp"
#include "mwkit/error.hpp"
#include "mwkit/expression.hpp"
#include "mwkit/geometry.hpp"
#include "mwkit/graph.hpp"
#include "mwkit/io.hpp"
#include "mwkit/matching.hpp"
#include "mwkit/mw_graph.hpp"
#include "mwkit/report.hpp"
#include "mwkit/structure.hpp"
#include "mwkit/symbolic.hpp"

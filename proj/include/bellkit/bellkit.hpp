#pragma once

#include "bellkit/analyses.hpp"
#include "bellkit/bell.hpp"
#include "bellkit/behavior.hpp"
#include "bellkit/constraints.hpp"
#include "bellkit/io.hpp"
#include "bellkit/lp.hpp"
#include "bellkit/rational.hpp"
#include "bellkit/report.hpp"
#include "bellkit/scenario.hpp"
#include "bellkit/vertices.hpp"

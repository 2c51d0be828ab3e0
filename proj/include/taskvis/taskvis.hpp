#pragma once

#include "taskvis/chart.hpp"
#include "taskvis/combine.hpp"
#include "taskvis/cost.hpp"
#include "taskvis/csv.hpp"
#include "taskvis/dataset.hpp"
#include "taskvis/enumerate.hpp"
#include "taskvis/error.hpp"
#include "taskvis/grounding.hpp"
#include "taskvis/ranking.hpp"
#include "taskvis/rulebase.hpp"
#include "taskvis/rules.hpp"
#include "taskvis/service.hpp"
#include "taskvis/tasks.hpp"
#include "taskvis/temporal.hpp"
#include "taskvis/vegalite.hpp"

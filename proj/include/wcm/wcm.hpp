#pragma once

#include "wcm/data_fit.hpp"
#include "wcm/edge_table.hpp"
#include "wcm/epidemic.hpp"
#include "wcm/graph.hpp"
#include "wcm/model.hpp"
#include "wcm/model_spec.hpp"
#include "wcm/outbreak.hpp"
#include "wcm/spec_io.hpp"
#include "wcm/threshold.hpp"

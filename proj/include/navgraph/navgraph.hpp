#pragma once

#include "navgraph/dynamic_ann.hpp"
#include "navgraph/euclid_merge.hpp"
#include "navgraph/facts.hpp"
#include "navgraph/graph.hpp"
#include "navgraph/hard_instances.hpp"
#include "navgraph/io.hpp"
#include "navgraph/metric.hpp"
#include "navgraph/net_pg.hpp"
#include "navgraph/nets.hpp"
#include "navgraph/parallel.hpp"
#include "navgraph/random.hpp"
#include "navgraph/search.hpp"
#include "navgraph/theta.hpp"

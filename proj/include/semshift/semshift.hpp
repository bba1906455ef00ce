#pragma once

#include "assignment.hpp"
#include "cluster_engine.hpp"
#include "embedding_store.hpp"
#include "evaluation.hpp"
#include "pipelines.hpp"
#include "points.hpp"
#include "projection.hpp"
#include "shift_measures.hpp"
#include "synthetic.hpp"

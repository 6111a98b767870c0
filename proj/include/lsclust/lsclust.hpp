#pragma once

#include "lsclust/clustering.hpp"
#include "lsclust/errors.hpp"
#include "lsclust/experiment.hpp"
#include "lsclust/io.hpp"
#include "lsclust/knn_graph.hpp"
#include "lsclust/lsqr.hpp"
#include "lsclust/metrics.hpp"
#include "lsclust/models.hpp"
#include "lsclust/pursuit.hpp"
#include "lsclust/random_walk.hpp"
#include "lsclust/rng.hpp"
#include "lsclust/sparse.hpp"

#pragma once

#include "embadapt/adam.hpp"
#include "embadapt/classifiers.hpp"
#include "embadapt/comparison.hpp"
#include "embadapt/config.hpp"
#include "embadapt/contrastive.hpp"
#include "embadapt/dataset.hpp"
#include "embadapt/dense_net.hpp"
#include "embadapt/errors.hpp"
#include "embadapt/folds.hpp"
#include "embadapt/matrix.hpp"
#include "embadapt/metrics.hpp"
#include "embadapt/parallel.hpp"
#include "embadapt/pca.hpp"
#include "embadapt/pipeline.hpp"
#include "embadapt/pipeline_io.hpp"
#include "embadapt/projection_head.hpp"
#include "embadapt/seeding.hpp"
#include "embadapt/synthetic.hpp"
#include "embadapt/timing.hpp"

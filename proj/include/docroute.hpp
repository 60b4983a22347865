#ifndef DOCROUTE_HPP_
#define DOCROUTE_HPP_

#include "docroute/aggregation.hpp"
#include "docroute/classifiers/classifier.hpp"
#include "docroute/corpus.hpp"
#include "docroute/error.hpp"
#include "docroute/evaluation.hpp"
#include "docroute/features.hpp"
#include "docroute/hyperopt.hpp"
#include "docroute/parallel.hpp"
#include "docroute/presets.hpp"
#include "docroute/random.hpp"
#include "docroute/resampling.hpp"
#include "docroute/runner.hpp"
#include "docroute/segmentation.hpp"
#include "docroute/textprep.hpp"
#include "docroute/types.hpp"

#endif  // DOCROUTE_HPP_

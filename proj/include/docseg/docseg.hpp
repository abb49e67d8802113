#pragma once

// Umbrella header for the document block-segmentation toolkit.

#include "docseg/ac_pipeline.hpp"
#include "docseg/block_grid.hpp"
#include "docseg/cluster.hpp"
#include "docseg/config.hpp"
#include "docseg/dct.hpp"
#include "docseg/errors.hpp"
#include "docseg/gmm.hpp"
#include "docseg/gradient.hpp"
#include "docseg/hist_pipeline.hpp"
#include "docseg/histogram.hpp"
#include "docseg/image.hpp"
#include "docseg/label_map.hpp"
#include "docseg/metrics.hpp"
#include "docseg/parallel.hpp"
#include "docseg/segmentation_result.hpp"
#include "docseg/smap.hpp"
#include "docseg/synthetic.hpp"
#include "docseg/text_extract.hpp"
#include "docseg/tuning.hpp"
#include "docseg/two_color.hpp"

#pragma once

#include "xline/annotations.hpp"
#include "xline/config.hpp"
#include "xline/core.hpp"
#include "xline/cutline.hpp"
#include "xline/decoder.hpp"
#include "xline/eval.hpp"
#include "xline/geometry.hpp"
#include "xline/grid.hpp"
#include "xline/grouping.hpp"
#include "xline/heatmap.hpp"
#include "xline/io.hpp"
#include "xline/loss.hpp"
#include "xline/pipeline.hpp"
#include "xline/selfcheck.hpp"
#include "xline/synthetic.hpp"

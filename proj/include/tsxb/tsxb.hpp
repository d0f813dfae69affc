#pragma once

// Umbrella header for the whole library.

#include "tsxb/attrib.hpp"
#include "tsxb/channels.hpp"
#include "tsxb/common.hpp"
#include "tsxb/dataset.hpp"
#include "tsxb/eval.hpp"
#include "tsxb/io.hpp"
#include "tsxb/masks.hpp"
#include "tsxb/models.hpp"
#include "tsxb/parallel.hpp"
#include "tsxb/report.hpp"
#include "tsxb/rng.hpp"
#include "tsxb/suite.hpp"
#include "tsxb/svg.hpp"
#include "tsxb/synth.hpp"
#include "tsxb/tensor.hpp"

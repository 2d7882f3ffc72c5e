#pragma once

#include "sstedr/beats.hpp"
#include "sstedr/cwt.hpp"
#include "sstedr/edr.hpp"
#include "sstedr/error.hpp"
#include "sstedr/evaluation.hpp"
#include "sstedr/io.hpp"
#include "sstedr/reconstruct.hpp"
#include "sstedr/ridge.hpp"
#include "sstedr/signal.hpp"
#include "sstedr/spline.hpp"
#include "sstedr/sst.hpp"
#include "sstedr/synthesis.hpp"

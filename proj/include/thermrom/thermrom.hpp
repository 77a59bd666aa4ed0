#pragma once

#include "thermrom/dynamics.hpp"
#include "thermrom/error.hpp"
#include "thermrom/identify.hpp"
#include "thermrom/io_metrics.hpp"
#include "thermrom/model_file.hpp"
#include "thermrom/nelder_mead.hpp"
#include "thermrom/presets.hpp"
#include "thermrom/refsim.hpp"
#include "thermrom/rom_core.hpp"
#include "thermrom/time_series.hpp"

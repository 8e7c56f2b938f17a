#pragma once

#include "tsm/audio_io.hpp"
#include "tsm/core_types.hpp"
#include "tsm/error.hpp"
#include "tsm/metrics.hpp"
#include "tsm/ola.hpp"
#include "tsm/phase_vocoder.hpp"
#include "tsm/pipeline.hpp"
#include "tsm/spectral.hpp"
#include "tsm/wsola.hpp"

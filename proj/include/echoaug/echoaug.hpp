#pragma once

#include "echoaug/analysis.hpp"
#include "echoaug/echo.hpp"
#include "echoaug/errors.hpp"
#include "echoaug/fan_mask.hpp"
#include "echoaug/geometric.hpp"
#include "echoaug/image.hpp"
#include "echoaug/imgproc.hpp"
#include "echoaug/metrics.hpp"
#include "echoaug/noise.hpp"
#include "echoaug/occlusion.hpp"
#include "echoaug/photometric.hpp"
#include "echoaug/pipeline.hpp"
#include "echoaug/png_io.hpp"
#include "echoaug/preset.hpp"
#include "echoaug/results_io.hpp"
#include "echoaug/rng.hpp"
#include "echoaug/transforms.hpp"

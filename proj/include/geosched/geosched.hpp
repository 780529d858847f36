#pragma once

#include "geosched/errors.hpp"
#include "geosched/exact_path.hpp"
#include "geosched/noise_process.hpp"
#include "geosched/path_geometry.hpp"
#include "geosched/quadrature.hpp"
#include "geosched/rng.hpp"
#include "geosched/sampler.hpp"
#include "geosched/schedule_io.hpp"
#include "geosched/verification.hpp"

#pragma once

#include "microloc/covariance.hpp"
#include "microloc/errors.hpp"
#include "microloc/estimate.hpp"
#include "microloc/fft.hpp"
#include "microloc/fracdiff.hpp"
#include "microloc/frontier.hpp"
#include "microloc/function_spec.hpp"
#include "microloc/io.hpp"
#include "microloc/oscillation.hpp"
#include "microloc/parallel.hpp"
#include "microloc/process_spec.hpp"
#include "microloc/quadrature.hpp"
#include "microloc/rng.hpp"
#include "microloc/sampled_path.hpp"
#include "microloc/stats.hpp"
#include "microloc/synth.hpp"

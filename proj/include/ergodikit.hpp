#pragma once

#include "ergodikit/alphabet.hpp"
#include "ergodikit/commands.hpp"
#include "ergodikit/config.hpp"
#include "ergodikit/empirical.hpp"
#include "ergodikit/errors.hpp"
#include "ergodikit/io.hpp"
#include "ergodikit/log_value.hpp"
#include "ergodikit/parallel.hpp"
#include "ergodikit/posterior.hpp"
#include "ergodikit/posterior_io.hpp"
#include "ergodikit/process_measure.hpp"
#include "ergodikit/projection.hpp"
#include "ergodikit/random.hpp"
#include "ergodikit/sampler.hpp"
#include "ergodikit/svg.hpp"
#include "ergodikit/tensor.hpp"
#include "ergodikit/trajectory.hpp"

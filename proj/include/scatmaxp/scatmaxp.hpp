#pragma once

#include "scatmaxp/error.hpp"
#include "scatmaxp/fft.hpp"
#include "scatmaxp/grid.hpp"
#include "scatmaxp/filterbank.hpp"
#include "scatmaxp/pooling.hpp"
#include "scatmaxp/parallel.hpp"
#include "scatmaxp/scattering.hpp"
#include "scatmaxp/summary.hpp"
#include "scatmaxp/io.hpp"
#include "scatmaxp/verify.hpp"

#pragma once
// Umbrella header.

#include "dasg/bounds.hpp"
#include "dasg/dense_oracle.hpp"
#include "dasg/errors.hpp"
#include "dasg/experiments.hpp"
#include "dasg/format.hpp"
#include "dasg/grids.hpp"
#include "dasg/kernels.hpp"
#include "dasg/spec_io.hpp"
#include "dasg/tensor_solver.hpp"

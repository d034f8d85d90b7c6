#pragma once

#include "pdmm/block_linalg.hpp"
#include "pdmm/diagnostics.hpp"
#include "pdmm/errors.hpp"
#include "pdmm/io.hpp"
#include "pdmm/problem.hpp"
#include "pdmm/problems.hpp"
#include "pdmm/prox.hpp"
#include "pdmm/solver.hpp"
#include "pdmm/stepsize.hpp"
#include "pdmm/variants.hpp"

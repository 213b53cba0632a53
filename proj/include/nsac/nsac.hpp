#pragma once

#include "nsac/connection.hpp"
#include "nsac/curvature.hpp"
#include "nsac/grspace.hpp"
#include "nsac/matrix.hpp"
#include "nsac/parallel.hpp"
#include "nsac/polynomial.hpp"
#include "nsac/random.hpp"
#include "nsac/rational.hpp"
#include "nsac/ricci.hpp"
#include "nsac/tensor.hpp"
#include "nsac/univariate.hpp"

#pragma once

#include "hoeffding/error.hpp"
#include "hoeffding/rational.hpp"
#include "hoeffding/multiset.hpp"
#include "hoeffding/sampling.hpp"
#include "hoeffding/models.hpp"
#include "hoeffding/kernels.hpp"
#include "hoeffding/coefficients.hpp"
#include "hoeffding/conditional.hpp"
#include "hoeffding/decomposition.hpp"
#include "hoeffding/linalg.hpp"
#include "hoeffding/weak_independence.hpp"
#include "hoeffding/weak_copy.hpp"

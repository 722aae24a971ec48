#ifndef HPCA_HPCA_HPP_
#define HPCA_HPCA_HPP_

// Umbrella header.

#include "hpca/bench.hpp"
#include "hpca/errors.hpp"
#include "hpca/estimators.hpp"
#include "hpca/matrix.hpp"
#include "hpca/models.hpp"
#include "hpca/rng.hpp"
#include "hpca/structure.hpp"
#include "hpca/subspace.hpp"
#include "hpca/svd.hpp"
#include "hpca/verify.hpp"
#include "hpca/version.hpp"

#endif  // HPCA_HPCA_HPP_

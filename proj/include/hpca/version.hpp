#ifndef HPCA_VERSION_HPP_
#define HPCA_VERSION_HPP_

namespace hpca {

// Library version. The RNG algorithm id is part of the reproducibility
// contract: results are only comparable across builds with the same id.
inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kRngAlgorithm =
    "rng-v1 (splitmix64 stream derivation, mt19937_64 engine, "
    "AS241 inverse-cdf normal, inversion/PTRS poisson)";

}  // namespace hpca

#endif  // HPCA_VERSION_HPP_

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "secdyn/polynomial.hpp"

namespace secdyn {

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The polynomial-identity suites behind the verify command: the
/// divided-difference factorization, the diagonal derivative identity, the
/// Taylor decomposition N = alpha D + N1 at multiple roots, and the
/// derivative recursions at root pairs checked against central finite
/// differences. With no polynomial given, a built-in library (randomized
/// polynomials plus the (x+2)x(x-1)^d family) exercises every suite;
/// otherwise the checks run on the given polynomial where applicable.
std::vector<VerifyCheck> run_verify_suite(const std::optional<Polynomial>& p,
                                          std::uint64_t rng_seed);

}  // namespace secdyn

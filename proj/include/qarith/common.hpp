// Copyright 2026 The qarith authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qarith {

/// Scalar field of all state spaces. Entries must stay finite; validating
/// constructors reject NaN/Inf.
using Amplitude = std::complex<double>;

using Index = std::int64_t;

/// Default max-norm comparison tolerance. All amplitudes in the standard
/// models are dyadic rationals times powers of 1/sqrt(2), so double
/// precision leaves ample headroom.
inline constexpr double kDefaultTol = 1e-10;

/// Largest dimension for which an operator may be materialized as a dense
/// matrix. Quadruple registers at n = 3 reach exactly this size.
inline constexpr Index kDenseCap = 4096;

/// Above this size composite operators are kept in structured form
/// (permutation, Kronecker factors, factored products) instead of dense.
inline constexpr Index kDensePreferredCap = 512;

/// Hard ceiling on any state-space dimension.
inline constexpr Index kMaxDim = Index{1} << 24;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatched or unsupported dimensions.
struct DimensionError : Error {
  using Error::Error;
};

/// Invalid arguments or configuration (out-of-range n, caps exceeded, ...).
struct DomainError : Error {
  using Error::Error;
};

/// A structural expectation failed: underivable ordering, unclassifiable
/// state, undecodable state, non-permutation column structure.
struct StructureError : Error {
  using Error::Error;
};

inline bool is_power_of_two(Index x) { return x > 0 && (x & (x - 1)) == 0; }

inline void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch, " +
                         std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace qarith

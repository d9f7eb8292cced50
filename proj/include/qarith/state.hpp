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

#include <Eigen/Dense>
#include <vector>

#include "qarith/common.hpp"

namespace qarith {

/// A vector in a 2^m-dimensional complex space. States representing numbers
/// are unit vectors; intermediate results of projections need not be, so the
/// norm is validated where the model contract requires it, not here.
struct StateVector {
  Eigen::VectorXcd amps;

  Index dim() const { return static_cast<Index>(amps.size()); }
  double norm() const { return amps.norm(); }
  bool is_normalized(double tol = kDefaultTol) const {
    return std::abs(norm() - 1.0) <= tol;
  }
};

/// Validating constructor: dimension must be a power of two, entries finite.
StateVector make_state(Eigen::VectorXcd amps);

/// e_k in the given dimension.
StateVector basis_state(Index dim, Index k);

/// <s1|s2>, conjugate-linear in the first argument.
Amplitude inner(const StateVector& s1, const StateVector& s2);

/// Kronecker product of states, left factor in the high-order index block:
/// (a (x) b)[i*b.dim + j] = a[i] * b[j].
StateVector tensor_state(const StateVector& a, const StateVector& b);

bool approx_equal(const StateVector& a, const StateVector& b,
                  double tol = kDefaultTol);

/// A two-block split of the qubit sites of a state. Site s corresponds to
/// bit s of the basis index (site 0 = least significant bit).
struct Bipartition {
  int sites = 0;
  std::vector<int> left;
  std::vector<int> right;
};

/// Validates that `left` is a nonempty proper subset of {0,...,sites-1} and
/// fills `right` with the complement.
Bipartition make_bipartition(int sites, std::vector<int> left);

/// The cut {site} vs everything else.
Bipartition single_site_cut(int sites, int site);

/// Number of singular values above `tol` of the amplitude array reshaped
/// across the cut. 1 means product state across this cut.
int schmidt_rank(const StateVector& s, const Bipartition& cut,
                 double tol = 1e-8);

}  // namespace qarith

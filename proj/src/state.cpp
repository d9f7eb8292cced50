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

#include "qarith/state.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace qarith {

StateVector make_state(Eigen::VectorXcd amps) {
  const Index dim = static_cast<Index>(amps.size());
  if (!is_power_of_two(dim)) {
    throw DimensionError("state dimension must be a power of two, got " +
                         std::to_string(dim));
  }
  if (!amps.allFinite()) {
    throw DomainError("state amplitudes must be finite");
  }
  return StateVector{std::move(amps)};
}

StateVector basis_state(Index dim, Index k) {
  if (!is_power_of_two(dim)) {
    throw DimensionError("state dimension must be a power of two, got " +
                         std::to_string(dim));
  }
  if (k < 0 || k >= dim) {
    throw DomainError("basis index " + std::to_string(k) +
                      " out of range for dimension " + std::to_string(dim));
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(k) = 1.0;
  return StateVector{std::move(v)};
}

Amplitude inner(const StateVector& s1, const StateVector& s2) {
  require_same_dim(s1.dim(), s2.dim(), "inner");
  return s1.amps.dot(s2.amps);
}

StateVector tensor_state(const StateVector& a, const StateVector& b) {
  const Index da = a.dim();
  const Index db = b.dim();
  if (da * db > kMaxDim) {
    throw DomainError("tensor_state: dimension " + std::to_string(da * db) +
                      " exceeds configured maximum");
  }
  Eigen::VectorXcd v(da * db);
  for (Index i = 0; i < da; ++i) {
    v.segment(i * db, db) = a.amps(i) * b.amps;
  }
  return StateVector{std::move(v)};
}

bool approx_equal(const StateVector& a, const StateVector& b, double tol) {
  if (a.dim() != b.dim()) return false;
  return (a.amps - b.amps).cwiseAbs().maxCoeff() <= tol;
}

Bipartition make_bipartition(int sites, std::vector<int> left) {
  if (sites < 2) {
    throw DomainError("bipartition needs at least two sites");
  }
  std::sort(left.begin(), left.end());
  left.erase(std::unique(left.begin(), left.end()), left.end());
  if (left.empty() || static_cast<int>(left.size()) >= sites) {
    throw DomainError("bipartition sides must both be nonempty");
  }
  for (int s : left) {
    if (s < 0 || s >= sites) {
      throw DomainError("bipartition site " + std::to_string(s) +
                        " out of range");
    }
  }
  Bipartition cut;
  cut.sites = sites;
  cut.left = std::move(left);
  for (int s = 0; s < sites; ++s) {
    if (!std::binary_search(cut.left.begin(), cut.left.end(), s)) {
      cut.right.push_back(s);
    }
  }
  return cut;
}

Bipartition single_site_cut(int sites, int site) {
  return make_bipartition(sites, {site});
}

int schmidt_rank(const StateVector& s, const Bipartition& cut, double tol) {
  const Index dim = s.dim();
  if (dim != (Index{1} << cut.sites)) {
    throw DimensionError("schmidt_rank: state dimension " +
                         std::to_string(dim) + " does not match " +
                         std::to_string(cut.sites) + " sites");
  }
  const Index rows = Index{1} << cut.left.size();
  const Index cols = Index{1} << cut.right.size();
  Eigen::MatrixXcd m(rows, cols);
  for (Index g = 0; g < dim; ++g) {
    Index r = 0;
    for (std::size_t t = 0; t < cut.left.size(); ++t) {
      r |= ((g >> cut.left[t]) & 1) << t;
    }
    Index c = 0;
    for (std::size_t t = 0; t < cut.right.size(); ++t) {
      c |= ((g >> cut.right[t]) & 1) << t;
    }
    m(r, c) = s.amps(g);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  return rank;
}

}  // namespace qarith

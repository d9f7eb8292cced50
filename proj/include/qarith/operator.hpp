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
#include <memory>
#include <variant>
#include <vector>

#include "qarith/common.hpp"
#include "qarith/state.hpp"

namespace qarith {

/// A linear map on a 2^m-dimensional space. Four interchangeable
/// representations are kept; all evaluate to the same dense matrix:
///   - Dense: explicit matrix (dimension capped by kDenseCap),
///   - Permutation: op e_j = phase[j] e_{target[j]} with a bijective target
///     map and unit-modulus phases,
///   - Kron: Kronecker product of smaller operators, left factor high-order,
///   - Factored: matrix product f_0 f_1 ... f_{m-1} (f_{m-1} applied first).
/// Instances are immutable and cheap to copy; the payload is shared.
class LinearOperator {
 public:
  struct Dense {
    Eigen::MatrixXcd mat;
  };
  struct Permutation {
    std::vector<Index> target;
    std::vector<Amplitude> phase;
  };
  struct Kron {
    std::vector<LinearOperator> factors;
  };
  struct Factored {
    std::vector<LinearOperator> factors;
  };
  using Repr = std::variant<Dense, Permutation, Kron, Factored>;

  enum class Kind { kDense, kPermutation, kKron, kFactored };

  static LinearOperator identity(Index dim);
  static LinearOperator dense(Eigen::MatrixXcd mat);
  /// Unit phases.
  static LinearOperator permutation(std::vector<Index> target);
  static LinearOperator permutation(std::vector<Index> target,
                                    std::vector<Amplitude> phase);
  /// Kronecker product; nested Kron factors are flattened.
  static LinearOperator kron_product(std::vector<LinearOperator> factors);
  /// Matrix product; nested Factored entries are flattened.
  static LinearOperator composite(std::vector<LinearOperator> factors);

  Index dim() const { return dim_; }
  Kind kind() const;
  const Repr& repr() const { return *repr_; }

 private:
  LinearOperator(Index dim, Repr repr);

  Index dim_ = 0;
  std::shared_ptr<const Repr> repr_;
};

/// op * s. Unitary ops map unit vectors to unit vectors.
StateVector apply(const LinearOperator& op, const StateVector& s);

/// f * g, so compose(f, g) applied to s equals f(g(s)). Structured operands
/// compose eagerly (permutations stay permutations); otherwise the result is
/// a factored product.
LinearOperator compose(const LinearOperator& f, const LinearOperator& g);

/// Kronecker product, left factor in the high-order index block.
LinearOperator tensor_op(const LinearOperator& f, const LinearOperator& g);

/// Conjugate transpose.
LinearOperator adjoint(const LinearOperator& op);

/// Dense materialization. Throws DomainError above kDenseCap.
Eigen::MatrixXcd dense_matrix(const LinearOperator& op);

/// max_ij |f_ij - g_ij| <= tol. Permutation pairs compare in O(dim).
bool approx_equal(const LinearOperator& f, const LinearOperator& g,
                  double tol = kDefaultTol);

/// ||op^dag op - I||_max <= tol. A product or Kronecker combination of
/// verified-unitary factors is accepted without materialization.
bool is_unitary(const LinearOperator& op, double tol = kDefaultTol);

/// ||op^2 - op||_max <= tol and ||op^dag - op||_max <= tol.
bool is_projection(const LinearOperator& op, double tol = kDefaultTol);

/// ||fg - gf||_max <= tol.
bool commutes(const LinearOperator& f, const LinearOperator& g,
              double tol = kDefaultTol);

/// Sum of diagonal entries.
Amplitude trace(const LinearOperator& op);

/// Builds sum_t kron(terms[t][0], ..., terms[t][k-1]) column by column.
/// Returns a Permutation when every column reduces to a single unit-modulus
/// entry (the projector-controlled factors of the product model do), a Dense
/// operator when the total dimension is at most dense_cap, and throws
/// StructureError otherwise.
LinearOperator sum_of_kron_terms(
    const std::vector<std::vector<LinearOperator>>& terms,
    Index dense_cap = kDensePreferredCap);

}  // namespace qarith

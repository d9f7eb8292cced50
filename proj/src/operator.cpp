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

#include "qarith/operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace qarith {

namespace {

// Structural-zero threshold for column sparsification.
constexpr double kDropEps = 1e-12;
// Off-diagonal threshold for detecting diagonal matrices.
constexpr double kDiagEps = 1e-15;
// Largest dimension at which eager dense composition is attempted.
constexpr Index kEagerDenseDim = 1024;

using Dense = LinearOperator::Dense;
using Permutation = LinearOperator::Permutation;
using Kron = LinearOperator::Kron;
using Factored = LinearOperator::Factored;

const Dense* as_dense(const LinearOperator& op) {
  return std::get_if<Dense>(&op.repr());
}
const Permutation* as_perm(const LinearOperator& op) {
  return std::get_if<Permutation>(&op.repr());
}
const Kron* as_kron(const LinearOperator& op) {
  return std::get_if<Kron>(&op.repr());
}
const Factored* as_factored(const LinearOperator& op) {
  return std::get_if<Factored>(&op.repr());
}

bool is_exact_identity_perm(const Permutation& p) {
  for (std::size_t j = 0; j < p.target.size(); ++j) {
    if (p.target[j] != static_cast<Index>(j)) return false;
    if (p.phase[j] != Amplitude(1.0, 0.0)) return false;
  }
  return true;
}

bool is_identity_perm_within(const Permutation& p, double tol) {
  for (std::size_t j = 0; j < p.target.size(); ++j) {
    if (p.target[j] != static_cast<Index>(j)) return false;
    if (std::abs(p.phase[j] - Amplitude(1.0, 0.0)) > tol) return false;
  }
  return true;
}

bool is_diagonal(const Eigen::MatrixXcd& m, double eps = kDiagEps) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r != c && std::abs(m(r, c)) > eps) return false;
    }
  }
  return true;
}

// f * g for a permutation f and dense g: rows of g are rescattered.
Eigen::MatrixXcd perm_times_dense(const Permutation& f,
                                  const Eigen::MatrixXcd& g) {
  Eigen::MatrixXcd out(g.rows(), g.cols());
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    out.row(f.target[r]) = f.phase[r] * g.row(r);
  }
  return out;
}

// f * g for dense f and a permutation g: columns of f are gathered.
Eigen::MatrixXcd dense_times_perm(const Eigen::MatrixXcd& f,
                                  const Permutation& g) {
  Eigen::MatrixXcd out(f.rows(), f.cols());
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    out.col(c) = g.phase[c] * f.col(g.target[c]);
  }
  return out;
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

LinearOperator::LinearOperator(Index dim, Repr repr)
    : dim_(dim), repr_(std::make_shared<const Repr>(std::move(repr))) {}

LinearOperator LinearOperator::identity(Index dim) {
  if (!is_power_of_two(dim)) {
    throw DimensionError("operator dimension must be a power of two, got " +
                         std::to_string(dim));
  }
  Permutation p;
  p.target.resize(dim);
  std::iota(p.target.begin(), p.target.end(), Index{0});
  p.phase.assign(dim, Amplitude(1.0, 0.0));
  return LinearOperator(dim, std::move(p));
}

LinearOperator LinearOperator::dense(Eigen::MatrixXcd mat) {
  if (mat.rows() != mat.cols()) {
    throw DimensionError("dense operator must be square");
  }
  const Index dim = static_cast<Index>(mat.rows());
  if (!is_power_of_two(dim)) {
    throw DimensionError("operator dimension must be a power of two, got " +
                         std::to_string(dim));
  }
  if (dim > kDenseCap) {
    throw DomainError("dense operator dimension " + std::to_string(dim) +
                      " exceeds cap " + std::to_string(kDenseCap));
  }
  if (!mat.allFinite()) {
    throw DomainError("dense operator entries must be finite");
  }
  return LinearOperator(dim, Dense{std::move(mat)});
}

LinearOperator LinearOperator::permutation(std::vector<Index> target) {
  std::vector<Amplitude> phase(target.size(), Amplitude(1.0, 0.0));
  return permutation(std::move(target), std::move(phase));
}

LinearOperator LinearOperator::permutation(std::vector<Index> target,
                                           std::vector<Amplitude> phase) {
  const Index dim = static_cast<Index>(target.size());
  if (!is_power_of_two(dim)) {
    throw DimensionError("operator dimension must be a power of two, got " +
                         std::to_string(dim));
  }
  if (phase.size() != target.size()) {
    throw DimensionError("permutation phase list length mismatch");
  }
  std::vector<bool> seen(target.size(), false);
  for (Index t : target) {
    if (t < 0 || t >= dim || seen[t]) {
      throw StructureError("permutation index map is not a bijection");
    }
    seen[t] = true;
  }
  for (const Amplitude& ph : phase) {
    if (!std::isfinite(ph.real()) || !std::isfinite(ph.imag()) ||
        std::abs(std::abs(ph) - 1.0) > 1e-9) {
      throw StructureError("permutation phases must have unit modulus");
    }
  }
  return LinearOperator(dim, Permutation{std::move(target), std::move(phase)});
}

LinearOperator LinearOperator::kron_product(
    std::vector<LinearOperator> factors) {
  if (factors.empty()) {
    throw DomainError("kron_product needs at least one factor");
  }
  std::vector<LinearOperator> flat;
  Index dim = 1;
  for (auto& f : factors) {
    if (const Kron* k = as_kron(f)) {
      flat.insert(flat.end(), k->factors.begin(), k->factors.end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  for (const auto& f : flat) {
    if (dim > kMaxDim / f.dim()) {
      throw DomainError("kron_product dimension exceeds configured maximum");
    }
    dim *= f.dim();
  }
  if (flat.size() == 1) return flat.front();
  return LinearOperator(dim, Kron{std::move(flat)});
}

LinearOperator LinearOperator::composite(std::vector<LinearOperator> factors) {
  if (factors.empty()) {
    throw DomainError("composite needs at least one factor");
  }
  const Index dim = factors.front().dim();
  std::vector<LinearOperator> flat;
  for (auto& f : factors) {
    require_same_dim(f.dim(), dim, "composite");
    if (const Factored* ff = as_factored(f)) {
      flat.insert(flat.end(), ff->factors.begin(), ff->factors.end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.size() == 1) return flat.front();
  return LinearOperator(dim, Factored{std::move(flat)});
}

LinearOperator::Kind LinearOperator::kind() const {
  switch (repr_->index()) {
    case 0:
      return Kind::kDense;
    case 1:
      return Kind::kPermutation;
    case 2:
      return Kind::kKron;
    default:
      return Kind::kFactored;
  }
}

namespace {

StateVector apply_dense(const Eigen::MatrixXcd& m, const StateVector& s) {
  // Basis and freshly built product states have exact structural zeros;
  // accumulating the few live columns beats a full matvec there.
  constexpr int kSparseLimit = 8;
  int nnz = 0;
  for (Eigen::Index j = 0; j < s.amps.size() && nnz <= kSparseLimit; ++j) {
    if (s.amps(j) != Amplitude(0.0, 0.0)) ++nnz;
  }
  if (nnz <= kSparseLimit) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.amps.size());
    for (Eigen::Index j = 0; j < s.amps.size(); ++j) {
      if (s.amps(j) != Amplitude(0.0, 0.0)) out += s.amps(j) * m.col(j);
    }
    return StateVector{std::move(out)};
  }
  return StateVector{m * s.amps};
}

StateVector apply_perm(const Permutation& p, const StateVector& s) {
  Eigen::VectorXcd out(s.amps.size());
  for (Eigen::Index j = 0; j < s.amps.size(); ++j) {
    out(p.target[j]) = p.phase[j] * s.amps(j);
  }
  return StateVector{std::move(out)};
}

StateVector apply_kron(const Kron& k, const StateVector& s) {
  Eigen::VectorXcd cur = s.amps;
  Eigen::VectorXcd nxt(cur.size());
  Index left = 1;
  Index right = static_cast<Index>(cur.size());
  for (const LinearOperator& f : k.factors) {
    const Index d = f.dim();
    right /= d;
    if (const Permutation* p = as_perm(f)) {
      if (!is_exact_identity_perm(*p)) {
        for (Index l = 0; l < left; ++l) {
          const Index base = l * d * right;
          for (Index b = 0; b < d; ++b) {
            nxt.segment(base + p->target[b] * right, right) =
                p->phase[b] * cur.segment(base + b * right, right);
          }
        }
        cur.swap(nxt);
      }
    } else {
      const Eigen::MatrixXcd m = dense_matrix(f);
      for (Index l = 0; l < left; ++l) {
        const Index base = l * d * right;
        for (Index a = 0; a < d; ++a) {
          Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(right);
          for (Index b = 0; b < d; ++b) {
            const Amplitude c = m(a, b);
            if (c != Amplitude(0.0, 0.0)) {
              acc += c * cur.segment(base + b * right, right);
            }
          }
          nxt.segment(base + a * right, right) = acc;
        }
      }
      cur.swap(nxt);
    }
    left *= d;
  }
  return StateVector{std::move(cur)};
}

}  // namespace

StateVector apply(const LinearOperator& op, const StateVector& s) {
  require_same_dim(op.dim(), s.dim(), "apply");
  if (const Dense* d = as_dense(op)) return apply_dense(d->mat, s);
  if (const Permutation* p = as_perm(op)) return apply_perm(*p, s);
  if (const Kron* k = as_kron(op)) return apply_kron(*k, s);
  const Factored& f = *as_factored(op);
  StateVector cur = s;
  for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it) {
    cur = apply(*it, cur);
  }
  return cur;
}

LinearOperator compose(const LinearOperator& f, const LinearOperator& g) {
  require_same_dim(f.dim(), g.dim(), "compose");
  const Index dim = f.dim();
  const Permutation* fp = as_perm(f);
  const Permutation* gp = as_perm(g);
  if (fp && gp) {
    Permutation out;
    out.target.resize(dim);
    out.phase.resize(dim);
    for (Index j = 0; j < dim; ++j) {
      const Index mid = gp->target[j];
      out.target[j] = fp->target[mid];
      out.phase[j] = gp->phase[j] * fp->phase[mid];
    }
    return LinearOperator::permutation(std::move(out.target),
                                       std::move(out.phase));
  }
  if (dim <= kEagerDenseDim) {
    const Dense* fd = as_dense(f);
    const Dense* gd = as_dense(g);
    if (fp && gd) return LinearOperator::dense(perm_times_dense(*fp, gd->mat));
    if (fd && gp) return LinearOperator::dense(dense_times_perm(fd->mat, *gp));
    if (fd && gd && dim <= kDensePreferredCap) {
      return LinearOperator::dense(fd->mat * gd->mat);
    }
  }
  return LinearOperator::composite({f, g});
}

LinearOperator tensor_op(const LinearOperator& f, const LinearOperator& g) {
  if (f.dim() > kMaxDim / g.dim()) {
    throw DomainError("tensor_op dimension exceeds configured maximum");
  }
  const Index dim = f.dim() * g.dim();
  const Permutation* fp = as_perm(f);
  const Permutation* gp = as_perm(g);
  if (fp && gp) {
    const Index gd = g.dim();
    Permutation out;
    out.target.resize(dim);
    out.phase.resize(dim);
    for (Index i = 0; i < f.dim(); ++i) {
      for (Index j = 0; j < gd; ++j) {
        out.target[i * gd + j] = fp->target[i] * gd + gp->target[j];
        out.phase[i * gd + j] = fp->phase[i] * gp->phase[j];
      }
    }
    return LinearOperator::permutation(std::move(out.target),
                                       std::move(out.phase));
  }
  const Dense* fd = as_dense(f);
  const Dense* gd = as_dense(g);
  if (fd && gd && dim <= kDensePreferredCap) {
    Eigen::MatrixXcd out(dim, dim);
    for (Index i = 0; i < f.dim(); ++i) {
      for (Index j = 0; j < f.dim(); ++j) {
        out.block(i * g.dim(), j * g.dim(), g.dim(), g.dim()) =
            fd->mat(i, j) * gd->mat;
      }
    }
    return LinearOperator::dense(std::move(out));
  }
  return LinearOperator::kron_product({f, g});
}

LinearOperator adjoint(const LinearOperator& op) {
  if (const Dense* d = as_dense(op)) {
    return LinearOperator::dense(d->mat.adjoint());
  }
  if (const Permutation* p = as_perm(op)) {
    const Index dim = op.dim();
    Permutation out;
    out.target.resize(dim);
    out.phase.resize(dim);
    for (Index j = 0; j < dim; ++j) {
      out.target[p->target[j]] = j;
      out.phase[p->target[j]] = std::conj(p->phase[j]);
    }
    return LinearOperator::permutation(std::move(out.target),
                                       std::move(out.phase));
  }
  if (const Kron* k = as_kron(op)) {
    std::vector<LinearOperator> factors;
    factors.reserve(k->factors.size());
    for (const auto& f : k->factors) factors.push_back(adjoint(f));
    return LinearOperator::kron_product(std::move(factors));
  }
  const Factored& f = *as_factored(op);
  std::vector<LinearOperator> factors;
  factors.reserve(f.factors.size());
  for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it) {
    factors.push_back(adjoint(*it));
  }
  return LinearOperator::composite(std::move(factors));
}

Eigen::MatrixXcd dense_matrix(const LinearOperator& op) {
  if (op.dim() > kDenseCap) {
    throw DomainError("dense materialization of dimension " +
                      std::to_string(op.dim()) + " exceeds cap " +
                      std::to_string(kDenseCap));
  }
  if (const Dense* d = as_dense(op)) return d->mat;
  if (const Permutation* p = as_perm(op)) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(op.dim(), op.dim());
    for (Index j = 0; j < op.dim(); ++j) m(p->target[j], j) = p->phase[j];
    return m;
  }
  if (const Kron* k = as_kron(op)) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Constant(1, 1, 1.0);
    for (const auto& f : k->factors) {
      const Eigen::MatrixXcd fm = dense_matrix(f);
      Eigen::MatrixXcd next(acc.rows() * fm.rows(), acc.cols() * fm.cols());
      for (Eigen::Index i = 0; i < acc.rows(); ++i) {
        for (Eigen::Index j = 0; j < acc.cols(); ++j) {
          next.block(i * fm.rows(), j * fm.cols(), fm.rows(), fm.cols()) =
              acc(i, j) * fm;
        }
      }
      acc.swap(next);
    }
    return acc;
  }
  const Factored& f = *as_factored(op);
  Eigen::MatrixXcd acc = dense_matrix(f.factors.front());
  for (std::size_t i = 1; i < f.factors.size(); ++i) {
    const LinearOperator& fi = f.factors[i];
    if (const Permutation* p = as_perm(fi)) {
      acc = dense_times_perm(acc, *p);
    } else {
      acc = acc * dense_matrix(fi);
    }
  }
  return acc;
}

bool approx_equal(const LinearOperator& f, const LinearOperator& g,
                  double tol) {
  if (f.dim() != g.dim()) return false;
  const Permutation* fp = as_perm(f);
  const Permutation* gp = as_perm(g);
  if (fp && gp) {
    // Columns of distinct permutations differ by a unit entry, far above
    // any sensible tolerance.
    for (Index j = 0; j < f.dim(); ++j) {
      if (fp->target[j] != gp->target[j]) return false;
      if (std::abs(fp->phase[j] - gp->phase[j]) > tol) return false;
    }
    return true;
  }
  return max_abs_diff(dense_matrix(f), dense_matrix(g)) <= tol;
}

bool is_unitary(const LinearOperator& op, double tol) {
  if (const Permutation* p = as_perm(op)) {
    for (const Amplitude& ph : p->phase) {
      if (std::abs(std::abs(ph) - 1.0) > tol) return false;
    }
    return true;  // bijectivity is a construction invariant
  }
  if (const Dense* d = as_dense(op)) {
    const Eigen::MatrixXcd prod = d->mat.adjoint() * d->mat;
    return max_abs_diff(
               prod, Eigen::MatrixXcd::Identity(op.dim(), op.dim())) <= tol;
  }
  // A product (Kronecker or composition) of unitaries is unitary.
  const std::vector<LinearOperator>* factors = nullptr;
  if (const Kron* k = as_kron(op)) factors = &k->factors;
  if (const Factored* f = as_factored(op)) factors = &f->factors;
  bool all = true;
  for (const auto& f : *factors) {
    if (!is_unitary(f, tol)) {
      all = false;
      break;
    }
  }
  if (all) return true;
  if (op.dim() <= kDensePreferredCap) {
    return is_unitary(LinearOperator::dense(dense_matrix(op)), tol);
  }
  throw DomainError("cannot decide unitarity at dimension " +
                    std::to_string(op.dim()));
}

bool is_projection(const LinearOperator& op, double tol) {
  if (const Permutation* p = as_perm(op)) {
    // The only unitary projection is the identity.
    return is_identity_perm_within(*p, tol);
  }
  if (const Dense* d = as_dense(op)) {
    if (is_diagonal(d->mat)) {
      for (Index j = 0; j < op.dim(); ++j) {
        const Amplitude v = d->mat(j, j);
        if (std::abs(v * v - v) > tol || std::abs(v.imag()) > tol) {
          return false;
        }
      }
      return true;
    }
    if (max_abs_diff(d->mat, d->mat.adjoint()) > tol) return false;
    if (op.dim() > kDensePreferredCap) {
      throw DomainError("cannot decide projection at dimension " +
                        std::to_string(op.dim()));
    }
    return max_abs_diff(d->mat * d->mat, d->mat) <= tol;
  }
  if (const Kron* k = as_kron(op)) {
    bool all = true;
    for (const auto& f : k->factors) {
      if (!is_projection(f, tol)) {
        all = false;
        break;
      }
    }
    if (all) return true;  // Kronecker product of projections projects
  }
  if (op.dim() <= kDensePreferredCap) {
    return is_projection(LinearOperator::dense(dense_matrix(op)), tol);
  }
  throw DomainError("cannot decide projection at dimension " +
                    std::to_string(op.dim()));
}

bool commutes(const LinearOperator& f, const LinearOperator& g, double tol) {
  require_same_dim(f.dim(), g.dim(), "commutes");
  const Index dim = f.dim();
  const Permutation* fp = as_perm(f);
  const Permutation* gp = as_perm(g);
  if (fp && gp) {
    for (Index j = 0; j < dim; ++j) {
      const Index tfg = fp->target[gp->target[j]];
      const Index tgf = gp->target[fp->target[j]];
      if (tfg != tgf) return false;
      const Amplitude pfg = gp->phase[j] * fp->phase[gp->target[j]];
      const Amplitude pgf = fp->phase[j] * gp->phase[fp->target[j]];
      if (std::abs(pfg - pgf) > tol) return false;
    }
    return true;
  }
  const Dense* fd = as_dense(f);
  const Dense* gd = as_dense(g);
  if (fd && gd && is_diagonal(fd->mat) && is_diagonal(gd->mat)) {
    return true;  // diagonal matrices commute exactly
  }
  if (fp && gd) {
    return max_abs_diff(perm_times_dense(*fp, gd->mat),
                        dense_times_perm(gd->mat, *fp)) <= tol;
  }
  if (fd && gp) {
    return max_abs_diff(dense_times_perm(fd->mat, *gp),
                        perm_times_dense(*gp, fd->mat)) <= tol;
  }
  if (dim > kDensePreferredCap) {
    throw DomainError("cannot decide commutation at dimension " +
                      std::to_string(dim));
  }
  const Eigen::MatrixXcd fm = dense_matrix(f);
  const Eigen::MatrixXcd gm = dense_matrix(g);
  return max_abs_diff(fm * gm, gm * fm) <= tol;
}

Amplitude trace(const LinearOperator& op) {
  if (const Dense* d = as_dense(op)) return d->mat.trace();
  if (const Permutation* p = as_perm(op)) {
    Amplitude t = 0.0;
    for (Index j = 0; j < op.dim(); ++j) {
      if (p->target[j] == j) t += p->phase[j];
    }
    return t;
  }
  if (const Kron* k = as_kron(op)) {
    Amplitude t = 1.0;
    for (const auto& f : k->factors) t *= trace(f);
    return t;
  }
  return dense_matrix(op).trace();
}

namespace {

using SparseColumn = std::vector<std::pair<Index, Amplitude>>;

std::vector<SparseColumn> sparse_columns(const LinearOperator& op) {
  std::vector<SparseColumn> cols(op.dim());
  if (const Permutation* p = as_perm(op)) {
    for (Index j = 0; j < op.dim(); ++j) {
      cols[j].emplace_back(p->target[j], p->phase[j]);
    }
    return cols;
  }
  const Eigen::MatrixXcd m = dense_matrix(op);
  for (Index j = 0; j < op.dim(); ++j) {
    for (Index r = 0; r < op.dim(); ++r) {
      if (m(r, j) != Amplitude(0.0, 0.0)) cols[j].emplace_back(r, m(r, j));
    }
  }
  return cols;
}

}  // namespace

LinearOperator sum_of_kron_terms(
    const std::vector<std::vector<LinearOperator>>& terms, Index dense_cap) {
  if (terms.empty() || terms.front().empty()) {
    throw DomainError("sum_of_kron_terms needs at least one term");
  }
  const std::size_t registers = terms.front().size();
  std::vector<Index> reg_dim(registers);
  for (std::size_t r = 0; r < registers; ++r) {
    reg_dim[r] = terms.front()[r].dim();
  }
  Index dim = 1;
  for (Index d : reg_dim) {
    if (dim > kMaxDim / d) {
      throw DomainError("sum_of_kron_terms dimension exceeds maximum");
    }
    dim *= d;
  }
  // Per-term, per-register sparse column tables.
  std::vector<std::vector<std::vector<SparseColumn>>> cols(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (terms[t].size() != registers) {
      throw DimensionError("sum_of_kron_terms: term register count mismatch");
    }
    cols[t].resize(registers);
    for (std::size_t r = 0; r < registers; ++r) {
      require_same_dim(terms[t][r].dim(), reg_dim[r], "sum_of_kron_terms");
      cols[t][r] = sparse_columns(terms[t][r]);
    }
  }
  std::vector<Index> stride(registers, 1);
  for (std::size_t r = registers - 1; r > 0; --r) {
    stride[r - 1] = stride[r] * reg_dim[r];
  }

  std::vector<Index> perm_target(dim);
  std::vector<Amplitude> perm_phase(dim);
  bool perm_ok = true;
  Eigen::MatrixXcd mat;
  const bool dense_ok = dim <= dense_cap && dim <= kDenseCap;
  if (dense_ok) mat = Eigen::MatrixXcd::Zero(dim, dim);

  std::vector<Index> digits(registers);
  SparseColumn column, partial, next;
  for (Index c = 0; c < dim; ++c) {
    Index rem = c;
    for (std::size_t r = 0; r < registers; ++r) {
      digits[r] = rem / stride[r];
      rem %= stride[r];
    }
    column.clear();
    for (std::size_t t = 0; t < terms.size(); ++t) {
      partial.assign(1, {Index{0}, Amplitude(1.0, 0.0)});
      for (std::size_t r = 0; r < registers && !partial.empty(); ++r) {
        next.clear();
        for (const auto& [row, amp] : partial) {
          for (const auto& [sr, sa] : cols[t][r][digits[r]]) {
            next.emplace_back(row + sr * stride[r], amp * sa);
          }
        }
        partial.swap(next);
      }
      column.insert(column.end(), partial.begin(), partial.end());
    }
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // Merge duplicate rows.
    SparseColumn merged;
    for (const auto& e : column) {
      if (!merged.empty() && merged.back().first == e.first) {
        merged.back().second += e.second;
      } else {
        merged.push_back(e);
      }
    }
    if (dense_ok) {
      for (const auto& [row, amp] : merged) mat(row, c) += amp;
    }
    if (perm_ok) {
      const std::pair<Index, Amplitude>* live = nullptr;
      for (const auto& e : merged) {
        if (std::abs(e.second) > kDropEps) {
          if (live != nullptr) {
            perm_ok = false;
            break;
          }
          live = &e;
        }
      }
      if (live == nullptr || std::abs(std::abs(live->second) - 1.0) > 1e-9) {
        perm_ok = false;
      }
      if (perm_ok) {
        perm_target[c] = live->first;
        perm_phase[c] = live->second;
      }
    }
    if (!perm_ok && !dense_ok) {
      throw StructureError(
          "sum_of_kron_terms: columns are not permutation-structured and "
          "dimension " +
          std::to_string(dim) + " exceeds the dense build cap");
    }
  }
  if (perm_ok) {
    std::vector<bool> seen(dim, false);
    bool bijective = true;
    for (Index t : perm_target) {
      if (seen[t]) {
        bijective = false;
        break;
      }
      seen[t] = true;
    }
    if (bijective) {
      return LinearOperator::permutation(std::move(perm_target),
                                         std::move(perm_phase));
    }
  }
  if (dense_ok) return LinearOperator::dense(std::move(mat));
  throw StructureError(
      "sum_of_kron_terms: columns are not permutation-structured and "
      "dimension " +
      std::to_string(dim) + " exceeds the dense build cap");
}

}  // namespace qarith

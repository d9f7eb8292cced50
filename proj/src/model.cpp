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

#include "qarith/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qarith {

namespace {

constexpr double kFamilyTol = 1e-8;

std::string join_labels(const std::vector<Label>& labels) {
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += ",";
    out += l;
  }
  return out;
}

}  // namespace

bool PropertyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const PropertyCheck& c) { return c.pass; });
}

const PropertyCheck& PropertyReport::check(int id) const {
  for (const auto& c : checks) {
    if (c.id == id) return c;
  }
  throw DomainError("no property check with id " + std::to_string(id));
}

const LinearOperator& SuccessorModel::shift(const Label& a) const {
  auto it = shifts.find(a);
  if (it == shifts.end()) throw DomainError("unknown parameter label " + a);
  return it->second;
}

const LinearOperator& SuccessorModel::flip(const Label& a) const {
  auto it = flips.find(a);
  if (it == flips.end()) throw DomainError("unknown parameter label " + a);
  return it->second;
}

const LinearOperator& SuccessorModel::projector(const Label& a,
                                                int bit) const {
  auto it = projectors.find(a);
  if (it == projectors.end()) throw DomainError("unknown parameter label " + a);
  return bit ? it->second.set : it->second.clear;
}

SuccessorModel build_product_model(int n, int max_n) {
  if (n < 1 || n > max_n) {
    throw DomainError("model size n = " + std::to_string(n) +
                      " outside 1.." + std::to_string(max_n));
  }
  const Index dim = Index{1} << n;
  SuccessorModel m;
  m.n = n;
  m.dim = dim;
  for (int j = 1; j <= n; ++j) {
    const Label a = "a" + std::to_string(j);
    m.params.labels.push_back(a);
    const Index step = Index{1} << (j - 1);

    std::vector<Index> shift_target(dim);
    std::vector<Index> flip_target(dim);
    Eigen::VectorXcd bit_set = Eigen::VectorXcd::Zero(dim);
    for (Index x = 0; x < dim; ++x) {
      shift_target[x] = (x + step) & (dim - 1);
      flip_target[x] = x ^ step;
      if ((x >> (j - 1)) & 1) bit_set(x) = 1.0;
    }
    m.shifts.emplace(a, LinearOperator::permutation(std::move(shift_target)));
    m.flips.emplace(a, LinearOperator::permutation(std::move(flip_target)));
    Eigen::MatrixXcd set_mat = bit_set.asDiagonal();
    Eigen::MatrixXcd clear_mat =
        Eigen::MatrixXcd::Identity(dim, dim) - set_mat;
    m.projectors.emplace(
        a, ProjectorPair{LinearOperator::dense(std::move(clear_mat)),
                         LinearOperator::dense(std::move(set_mat))});
  }
  m.family.reserve(dim);
  for (Index k = 0; k < dim; ++k) m.family.push_back(basis_state(dim, k));
  if (!verify_model(m)) {
    throw Error("product model failed its own property checks");
  }
  return m;
}

SuccessorModel model_from_families(ParameterSet params,
                                   std::map<Label, LinearOperator> shifts,
                                   std::map<Label, LinearOperator> flips,
                                   std::map<Label, ProjectorPair> projectors,
                                   std::vector<StateVector> family,
                                   std::optional<LinearOperator> basis_change) {
  if (params.labels.empty()) throw DomainError("empty parameter set");
  std::set<Label> distinct(params.labels.begin(), params.labels.end());
  if (distinct.size() != params.labels.size()) {
    throw DomainError("parameter labels must be distinct");
  }
  SuccessorModel m;
  m.n = static_cast<int>(params.labels.size());
  m.dim = shifts.begin()->second.dim();
  m.params = std::move(params);
  m.shifts = std::move(shifts);
  m.flips = std::move(flips);
  m.projectors = std::move(projectors);
  m.family = std::move(family);
  m.basis_change = std::move(basis_change);
  return m;
}

Index find_family_index(const SuccessorModel& m, const StateVector& s,
                        Amplitude* phase_out) {
  const auto overlap_hit = [&](Index j) -> bool {
    const Amplitude ov = inner(m.family[j], s);
    if (std::abs(ov) > 0.99) {
      if (phase_out != nullptr) *phase_out = ov;
      return true;
    }
    return false;
  };
  // Family states concentrate on the largest-amplitude index (product model)
  // or on an index/complement pair (conjugated models); try those first.
  Index guess = 0;
  double best = -1.0;
  for (Index i = 0; i < s.dim(); ++i) {
    const double a = std::abs(s.amps(i));
    if (a > best) {
      best = a;
      guess = i;
    }
  }
  if (guess < static_cast<Index>(m.family.size()) && overlap_hit(guess)) {
    return guess;
  }
  const Index comp = m.dim - 1 - guess;
  if (comp >= 0 && comp < static_cast<Index>(m.family.size()) &&
      overlap_hit(comp)) {
    return comp;
  }
  for (Index j = 0; j < static_cast<Index>(m.family.size()); ++j) {
    if (j != guess && j != comp && overlap_hit(j)) return j;
  }
  return -1;
}

namespace {

// Family permutation induced by op, or empty on failure (not family
// preserving, or phases off unity beyond kFamilyTol).
struct FamilyAction {
  std::vector<Index> target;
  bool phase_free = true;
  std::string failure;
};

FamilyAction family_action(const SuccessorModel& m, const LinearOperator& op) {
  FamilyAction act;
  const Index count = static_cast<Index>(m.family.size());
  act.target.resize(count, -1);
  std::vector<bool> hit(count, false);
  for (Index i = 0; i < count; ++i) {
    const StateVector t = apply(op, m.family[i]);
    Amplitude phase;
    const Index j = find_family_index(m, t, &phase);
    if (j < 0) {
      act.failure = "image of family state " + std::to_string(i) +
                    " leaves the family";
      return act;
    }
    if (std::abs(phase - Amplitude(1.0, 0.0)) > kFamilyTol) {
      act.phase_free = false;
    }
    if (hit[j]) {
      act.failure = "family action is not injective at state " +
                    std::to_string(j);
      return act;
    }
    hit[j] = true;
    act.target[i] = j;
  }
  return act;
}

// Cycle lengths of a permutation given as a target vector.
std::vector<Index> cycle_lengths(const std::vector<Index>& target) {
  std::vector<bool> seen(target.size(), false);
  std::vector<Index> lengths;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (seen[i]) continue;
    Index len = 0;
    Index cur = static_cast<Index>(i);
    while (!seen[cur]) {
      seen[cur] = true;
      cur = target[cur];
      ++len;
    }
    lengths.push_back(len);
  }
  return lengths;
}

// squares[a] = label of the family member equal to shift(a)^2, if any.
std::map<Label, std::optional<Label>> square_matches(const SuccessorModel& m,
                                                     bool* ambiguous,
                                                     std::string* detail) {
  std::map<Label, std::optional<Label>> match;
  for (const auto& a : m.params.labels) {
    const LinearOperator sq = compose(m.shift(a), m.shift(a));
    std::optional<Label> found;
    bool multi = false;
    for (const auto& b : m.params.labels) {
      if (approx_equal(sq, m.shift(b), kDefaultTol)) {
        if (found) {
          multi = true;
          break;
        }
        found = b;
      }
    }
    if (multi) {
      if (ambiguous != nullptr) *ambiguous = true;
      if (detail != nullptr) *detail = "square of " + a + " matches several shifts";
    }
    match[a] = found;
  }
  return match;
}

}  // namespace

PropertyReport check_successor_properties(const SuccessorModel& m) {
  PropertyReport report;
  const Index dim = m.dim;

  // 1: each shift is a cyclic shift of the family: a phase-free permutation
  // without fixed points whose cycles share one even length dividing 2^n.
  {
    bool pass = true;
    std::string witness;
    for (const auto& a : m.params.labels) {
      const FamilyAction act = family_action(m, m.shift(a));
      if (!act.failure.empty()) {
        pass = false;
        witness = a + ": " + act.failure;
        break;
      }
      if (!act.phase_free) {
        pass = false;
        witness = a + ": family action carries nonunit phases";
        break;
      }
      bool fixed = false;
      for (std::size_t i = 0; i < act.target.size(); ++i) {
        if (act.target[i] == static_cast<Index>(i)) fixed = true;
      }
      if (fixed) {
        pass = false;
        witness = a + ": has a fixed family state";
        break;
      }
      const std::vector<Index> lens = cycle_lengths(act.target);
      const Index len = lens.front();
      const bool uniform =
          std::all_of(lens.begin(), lens.end(),
                      [len](Index l) { return l == len; });
      if (!uniform || len % 2 != 0 || dim % len != 0) {
        pass = false;
        witness = a + ": cycle structure is not a uniform even divisor of " +
                  std::to_string(dim);
        break;
      }
    }
    report.checks.push_back({1, "cyclic-shift", pass, witness});
  }

  // 2: pairwise commutation.
  {
    bool pass = true;
    std::string witness;
    for (std::size_t i = 0; i < m.params.labels.size() && pass; ++i) {
      for (std::size_t j = i + 1; j < m.params.labels.size(); ++j) {
        const Label& a = m.params.labels[i];
        const Label& b = m.params.labels[j];
        if (!commutes(m.shift(a), m.shift(b), kDefaultTol)) {
          pass = false;
          witness = a + "," + b;
          break;
        }
      }
    }
    report.checks.push_back({2, "shift-commutation", pass, witness});
  }

  bool ambiguous = false;
  std::string ambiguity;
  const auto match = square_matches(m, &ambiguous, &ambiguity);
  const LinearOperator ident = LinearOperator::identity(dim);
  std::vector<Label> involutions;
  for (const auto& a : m.params.labels) {
    if (approx_equal(compose(m.shift(a), m.shift(a)), ident, kDefaultTol)) {
      involutions.push_back(a);
    }
  }

  // 3: exactly one shift squares to the identity.
  report.checks.push_back({3, "unique-involution", involutions.size() == 1,
                           involutions.size() == 1
                               ? "a_m=" + involutions.front()
                               : "involutions: " + join_labels(involutions)});

  // 4: every non-involution squares to exactly one other shift.
  {
    bool pass = !ambiguous;
    std::string witness = ambiguity;
    if (pass) {
      for (const auto& a : m.params.labels) {
        if (std::find(involutions.begin(), involutions.end(), a) !=
            involutions.end()) {
          continue;
        }
        if (!match.at(a) || *match.at(a) == a) {
          pass = false;
          witness = a;
          break;
        }
      }
    }
    report.checks.push_back({4, "square-is-successor", pass, witness});
  }

  // 5: no shift has two distinct square roots in the family.
  {
    bool pass = true;
    std::string witness;
    for (const auto& b : m.params.labels) {
      int roots = 0;
      for (const auto& a : m.params.labels) {
        if (a != b && match.at(a) == b) ++roots;
      }
      if (roots > 1) {
        pass = false;
        witness = b;
        break;
      }
    }
    report.checks.push_back({5, "unique-square-root", pass, witness});
  }

  // 6: exactly one shift is outside the image of squaring.
  {
    std::vector<Label> starts;
    for (const auto& b : m.params.labels) {
      bool in_image = false;
      for (const auto& a : m.params.labels) {
        if (match.at(a) == b) in_image = true;
      }
      if (!in_image) starts.push_back(b);
    }
    report.checks.push_back({6, "unique-chain-start", starts.size() == 1,
                             starts.size() == 1
                                 ? "a_l=" + starts.front()
                                 : "starts: " + join_labels(starts)});
  }
  return report;
}

PropertyReport check_projection_properties(const SuccessorModel& m) {
  PropertyReport report;
  const Index dim = m.dim;
  const Index half = dim / 2;

  // 7: each projector has rank 2^(n-1), all commute, poles are complements.
  {
    bool pass = true;
    std::string witness;
    std::vector<std::pair<Label, int>> keys;
    for (const auto& a : m.params.labels) {
      keys.emplace_back(a, 0);
      keys.emplace_back(a, 1);
    }
    for (const auto& [a, bit] : keys) {
      const LinearOperator& p = m.projector(a, bit);
      if (!is_projection(p, kDefaultTol)) {
        pass = false;
        witness = a + ": not a projection";
        break;
      }
      if (std::abs(trace(p) - Amplitude(static_cast<double>(half), 0.0)) >
          1e-7) {
        pass = false;
        witness = a + ": rank differs from " + std::to_string(half);
        break;
      }
    }
    if (pass) {
      for (const auto& a : m.params.labels) {
        const Eigen::MatrixXcd sum = dense_matrix(m.projector(a, 0)) +
                                     dense_matrix(m.projector(a, 1));
        if ((sum - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() >
            kDefaultTol) {
          pass = false;
          witness = a + ": poles are not complementary";
          break;
        }
      }
    }
    if (pass) {
      for (std::size_t i = 0; i < keys.size() && pass; ++i) {
        for (std::size_t j = i + 1; j < keys.size(); ++j) {
          if (!commutes(m.projector(keys[i].first, keys[i].second),
                        m.projector(keys[j].first, keys[j].second),
                        kDefaultTol)) {
            pass = false;
            witness = keys[i].first + "," + keys[j].first;
            break;
          }
        }
      }
    }
    report.checks.push_back({7, "projector-shape", pass, witness});
  }

  // 8: exchanges commute with the projectors of other parameters.
  {
    bool pass = true;
    std::string witness;
    for (const auto& a : m.params.labels) {
      for (const auto& b : m.params.labels) {
        if (a == b) continue;
        for (int bit = 0; bit < 2 && pass; ++bit) {
          if (!commutes(m.flip(a), m.projector(b, bit), kDefaultTol)) {
            pass = false;
            witness = a + "," + b;
          }
        }
        if (!pass) break;
      }
      if (!pass) break;
    }
    report.checks.push_back({8, "exchange-distinct-parameters", pass, witness});
  }

  // 9: the exchange swaps its own projector poles.
  {
    bool pass = true;
    std::string witness;
    for (const auto& a : m.params.labels) {
      const bool swap_ok =
          approx_equal(compose(m.flip(a), m.projector(a, 0)),
                       compose(m.projector(a, 1), m.flip(a)), kDefaultTol) &&
          approx_equal(compose(m.flip(a), m.projector(a, 1)),
                       compose(m.projector(a, 0), m.flip(a)), kDefaultTol);
      if (!swap_ok) {
        pass = false;
        witness = a;
        break;
      }
    }
    report.checks.push_back({9, "exchange-swaps-poles", pass, witness});
  }

  // 10: every family state is fixed by exactly one pole per parameter.
  {
    bool pass = true;
    std::string witness;
    for (std::size_t i = 0; i < m.family.size() && pass; ++i) {
      for (const auto& a : m.params.labels) {
        int fixing = 0;
        for (int bit = 0; bit < 2; ++bit) {
          const StateVector out = apply(m.projector(a, bit), m.family[i]);
          if (approx_equal(out, m.family[i], kFamilyTol)) ++fixing;
        }
        if (fixing != 1) {
          pass = false;
          witness = "state " + std::to_string(i) + ", parameter " + a;
          break;
        }
      }
    }
    report.checks.push_back({10, "unique-pole-per-state", pass, witness});
  }

  // 11: classification separates the family.
  {
    bool pass = true;
    std::string witness;
    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i < m.family.size(); ++i) {
      std::vector<int> key;
      try {
        const BitFunction bf = classify_state(m, m.family[i]);
        for (const auto& [label, bit] : bf.bits) key.push_back(bit);
      } catch (const StructureError&) {
        pass = false;
        witness = "state " + std::to_string(i) + " not classifiable";
        break;
      }
      if (!seen.insert(key).second) {
        pass = false;
        witness = "state " + std::to_string(i) + " repeats a classification";
        break;
      }
    }
    report.checks.push_back({11, "classification-injective", pass, witness});
  }
  return report;
}

PropertyReport check_recursion_property(const SuccessorModel& m) {
  PropertyReport report;
  bool pass = true;
  std::string witness;
  std::vector<Label> order;
  try {
    order = m.ordering ? *m.ordering : derive_ordering(m);
  } catch (const StructureError& e) {
    report.checks.push_back({12, "shift-recursion", false, e.what()});
    return report;
  }
  const int n = static_cast<int>(order.size());
  for (int j = 0; j < n - 1 && pass; ++j) {
    const Label& a = order[j];
    const Label& succ = order[j + 1];
    const Eigen::MatrixXcd rhs =
        dense_matrix(compose(m.flip(a), m.projector(a, 0))) +
        dense_matrix(compose(compose(m.shift(succ), m.flip(a)),
                             m.projector(a, 1)));
    if ((dense_matrix(m.shift(a)) - rhs).cwiseAbs().maxCoeff() > kDefaultTol) {
      pass = false;
      witness = a;
    }
  }
  if (pass) {
    const Label& last = order.back();
    if (!approx_equal(m.shift(last), m.flip(last), kDefaultTol)) {
      pass = false;
      witness = last + ": final shift differs from its exchange";
    }
  }
  report.checks.push_back({12, "shift-recursion", pass, witness});
  return report;
}

PropertyReport check_all_properties(const SuccessorModel& m) {
  PropertyReport all = check_successor_properties(m);
  for (auto& c : check_projection_properties(m).checks) {
    all.checks.push_back(std::move(c));
  }
  for (auto& c : check_recursion_property(m).checks) {
    all.checks.push_back(std::move(c));
  }
  return all;
}

std::vector<Label> derive_ordering(const SuccessorModel& m) {
  bool ambiguous = false;
  std::string ambiguity;
  const auto match = square_matches(m, &ambiguous, &ambiguity);
  if (ambiguous) {
    throw StructureError("ordering underivable: ambiguous chain link (" +
                         ambiguity + ")");
  }
  const LinearOperator ident = LinearOperator::identity(m.dim);
  std::vector<Label> involutions;
  for (const auto& a : m.params.labels) {
    if (approx_equal(compose(m.shift(a), m.shift(a)), ident, kDefaultTol)) {
      involutions.push_back(a);
    }
  }
  if (involutions.size() != 1) {
    throw StructureError(
        "ordering underivable: chain end missing or not unique "
        "(labels squaring to identity: " +
        join_labels(involutions) + ")");
  }
  std::vector<Label> starts;
  for (const auto& b : m.params.labels) {
    bool in_image = false;
    for (const auto& a : m.params.labels) {
      if (match.at(a) == b) in_image = true;
    }
    if (!in_image) starts.push_back(b);
  }
  if (starts.size() != 1) {
    throw StructureError(
        "ordering underivable: chain start missing or not unique "
        "(candidates: " +
        join_labels(starts) + ")");
  }
  std::vector<Label> order{starts.front()};
  std::set<Label> visited{starts.front()};
  while (static_cast<int>(order.size()) < m.n) {
    const auto& next = match.at(order.back());
    if (!next) {
      throw StructureError("ordering underivable: chain link missing after " +
                           order.back());
    }
    if (visited.count(*next) != 0) {
      throw StructureError("ordering underivable: chain revisits " + *next);
    }
    order.push_back(*next);
    visited.insert(*next);
  }
  if (order.back() != involutions.front()) {
    throw StructureError("ordering underivable: chain does not end at the "
                         "involution label");
  }
  return order;
}

bool verify_model(SuccessorModel& m) {
  try {
    m.ordering = derive_ordering(m);
  } catch (const StructureError&) {
    m.verified = false;
    return false;
  }
  const PropertyReport report = check_all_properties(m);
  m.verified = report.all_pass();
  if (m.verified && !m.zero) {
    m.zero = zero_state(m);
  }
  return m.verified;
}

BitFunction classify_state(const SuccessorModel& m, const StateVector& s) {
  require_same_dim(m.dim, s.dim(), "classify_state");
  BitFunction bf;
  for (const auto& a : m.params.labels) {
    const StateVector projected = apply(m.projector(a, 1), s);
    bf.bits[a] = projected.norm() > 0.5 ? 1 : 0;
  }
  StateVector probe = s;
  for (const auto& a : m.params.labels) {
    probe = apply(m.projector(a, bf.bits[a]), probe);
  }
  if (!approx_equal(probe, s, kFamilyTol)) {
    throw StructureError(
        "state is not classifiable: no projector pattern fixes it");
  }
  return bf;
}

StateVector zero_state(const SuccessorModel& m) {
  if (m.zero) return *m.zero;
  for (const auto& s : m.family) {
    StateVector probe = s;
    for (const auto& a : m.params.labels) {
      probe = apply(m.projector(a, 0), probe);
    }
    if (approx_equal(probe, s, kFamilyTol)) return s;
  }
  throw StructureError("no family state is fixed by every clear projector");
}

StateVector state_from_bits(const SuccessorModel& m, const BitFunction& bits) {
  StateVector s = zero_state(m);
  for (const auto& a : m.params.labels) {
    auto it = bits.bits.find(a);
    if (it == bits.bits.end()) {
      throw DomainError("bit function is not total: missing label " + a);
    }
    if (it->second != 0) s = apply(m.shift(a), s);
  }
  return s;
}

Index bits_to_value(const SuccessorModel& m, const BitFunction& bits) {
  if (!m.ordering) {
    throw DomainError("bits_to_value requires a derived ordering");
  }
  Index value = 0;
  for (std::size_t j = 0; j < m.ordering->size(); ++j) {
    auto it = bits.bits.find((*m.ordering)[j]);
    if (it == bits.bits.end()) {
      throw DomainError("bit function is not total: missing label " +
                        (*m.ordering)[j]);
    }
    if (it->second != 0) value |= Index{1} << j;
  }
  return value;
}

BitFunction value_to_bits(const SuccessorModel& m, Index value) {
  if (!m.ordering) {
    throw DomainError("value_to_bits requires a derived ordering");
  }
  if (value < 0 || value >= m.dim) {
    throw DomainError("value " + std::to_string(value) + " out of range");
  }
  BitFunction bf;
  for (std::size_t j = 0; j < m.ordering->size(); ++j) {
    bf.bits[(*m.ordering)[j]] = static_cast<int>((value >> j) & 1);
  }
  return bf;
}

}  // namespace qarith

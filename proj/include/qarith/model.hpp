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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qarith/operator.hpp"
#include "qarith/state.hpp"

namespace qarith {

using Label = std::string;

/// The n distinct parameter labels of a model. Construction order carries no
/// meaning; derive_ordering recovers the arithmetic order from the shift
/// operators alone.
struct ParameterSet {
  std::vector<Label> labels;
};

/// A total map from parameter labels to {0, 1}: 0 selects the clear pole
/// (projector fixing the zero side), 1 the set pole. Encodes the binary
/// digits of the state it classifies.
struct BitFunction {
  std::map<Label, int> bits;

  bool operator==(const BitFunction& other) const = default;
};

struct PropertyCheck {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string witness;  // failure evidence, or informative labels on pass
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;

  bool all_pass() const;
  const PropertyCheck& check(int id) const;
};

/// Pair of complementary rank-2^(n-1) projectors for one parameter:
/// clear + set = identity.
struct ProjectorPair {
  LinearOperator clear;
  LinearOperator set;
};

/// A multisuccessor model: per parameter one cyclic-shift operator, one
/// exchange unitary and a complementary projector pair, plus the orthonormal
/// state family the operators permute. Immutable once verified.
struct SuccessorModel {
  int n = 0;
  Index dim = 0;
  ParameterSet params;
  std::map<Label, LinearOperator> shifts;     // the successor family
  std::map<Label, LinearOperator> flips;      // single-digit exchange unitaries
  std::map<Label, ProjectorPair> projectors;  // digit-value projectors
  std::vector<StateVector> family;            // 2^n orthonormal states
  std::optional<std::vector<Label>> ordering;
  std::optional<StateVector> zero;
  /// When set, family[k] equals basis_change * e_k and every operator is the
  /// conjugate of its standard product-model counterpart.
  std::optional<LinearOperator> basis_change;
  bool verified = false;

  const LinearOperator& shift(const Label& a) const;
  const LinearOperator& flip(const Label& a) const;
  const LinearOperator& projector(const Label& a, int bit) const;
};

/// Standard product model on 2^n basis states: shift j adds 2^(j-1) mod 2^n,
/// the flip toggles bit j-1, the projectors read bit j-1. Verified on
/// construction.
SuccessorModel build_product_model(int n, int max_n = 10);

/// Assembles a model from explicit operator families (no verification run).
SuccessorModel model_from_families(
    ParameterSet params, std::map<Label, LinearOperator> shifts,
    std::map<Label, LinearOperator> flips,
    std::map<Label, ProjectorPair> projectors, std::vector<StateVector> family,
    std::optional<LinearOperator> basis_change = std::nullopt);

/// Shift-family properties 1-6: cyclic shift, commutation, unique involution,
/// unique squares, unique chain start.
PropertyReport check_successor_properties(const SuccessorModel& m);

/// Projector/exchange properties 7-11: rank and complementarity, exchange
/// relations, unique pole per family state, injective classification.
PropertyReport check_projection_properties(const SuccessorModel& m);

/// Property 12: each shift decomposes into exchange plus carry into the next
/// shift; the last shift equals its exchange.
PropertyReport check_recursion_property(const SuccessorModel& m);

/// All twelve checks in order.
PropertyReport check_all_properties(const SuccessorModel& m);

/// Recovers the unique squaring chain a_1, ..., a_n with
/// shift(a_{j+1}) = shift(a_j)^2 and shift(a_n)^2 = identity.
/// Throws StructureError when a link is missing or ambiguous.
std::vector<Label> derive_ordering(const SuccessorModel& m);

/// Runs every property check, caching ordering and zero state on success.
/// Returns true and marks the model verified iff all twelve pass.
bool verify_model(SuccessorModel& m);

/// The unique bit function fixed by the state (projector eigenvalues),
/// decided by norm threshold 0.5 and re-verified to 1e-8.
/// Throws StructureError for states outside the family.
BitFunction classify_state(const SuccessorModel& m, const StateVector& s);

/// The family state fixed by every clear projector (the additive identity).
StateVector zero_state(const SuccessorModel& m);

/// Applies the shifts selected by the bit function to the zero state.
StateVector state_from_bits(const SuccessorModel& m, const BitFunction& bits);

/// Index of the family state with |overlap| close to 1, or -1 if none.
/// If phase_out is non-null it receives the overlap.
Index find_family_index(const SuccessorModel& m, const StateVector& s,
                        Amplitude* phase_out = nullptr);

/// Integer value of a bit function under the derived ordering.
Index bits_to_value(const SuccessorModel& m, const BitFunction& bits);
BitFunction value_to_bits(const SuccessorModel& m, Index value);

}  // namespace qarith

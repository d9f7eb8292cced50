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

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qarith/model.hpp"

namespace qarith {

enum class EncodingKind { product, entangled, custom };

std::string to_string(EncodingKind kind);

/// A bijection between 0..2^n-1 and orthonormal states of a verified model.
struct NumberEncoding {
  int n = 0;
  EncodingKind kind = EncodingKind::custom;
  std::vector<StateVector> states;  // indexed by number
  std::shared_ptr<const SuccessorModel> model;
};

/// Numbers as computational basis states over the standard product model.
NumberEncoding build_product_encoding(int n);

/// The basis change pairing each bit string with its bitwise complement:
/// |s> -> (|s> + |comp s>)/sqrt(2) and |comp s> -> (|s> - |comp s>)/sqrt(2)
/// for strings s with clear top bit. Unitary; its images for n = 2 are the
/// four Bell states.
LinearOperator build_entangling_unitary(int n);

/// Numbers as the entangled images of the basis under the unitary above;
/// the underlying model operators are the conjugates of the product model's.
/// Requires n >= 2: with a single site there is no pair to entangle.
NumberEncoding build_entangled_encoding(int n);

StateVector encode_number(const NumberEncoding& e, Index k);

/// Table decode: the number whose encoded state has |overlap|^2 >= 0.999
/// with s. Throws StructureError for states outside the encoding.
Index decode_number(const NumberEncoding& e, const StateVector& s);

/// Independent decode route: classify through the model projectors and read
/// the bits under the derived ordering. Agrees with decode_number on every
/// encoded state.
Index decode_number_by_bits(const NumberEncoding& e, const StateVector& s);

struct EntanglementCertificate {
  enum class Verdict { all_product, all_entangled, mixed };

  int n = 0;
  EncodingKind kind = EncodingKind::custom;
  /// ranks[number][site]: Schmidt rank across the single-site cut at `site`.
  std::vector<std::vector<int>> ranks;
  Verdict verdict = Verdict::all_product;
};

std::string to_string(EntanglementCertificate::Verdict v);

/// Schmidt rank of every encoded state across every single-site cut.
EntanglementCertificate certify_entanglement(const NumberEncoding& e,
                                             double tol = 1e-8);

/// {n, kind, states: [[[re, im], ...] per number]} for external inspection.
nlohmann::json encoding_to_json(const NumberEncoding& e);

}  // namespace qarith

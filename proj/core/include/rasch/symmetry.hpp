#pragma once

// Rule permutations and 0/1 exchanges acting on settings, designs and
// parameters, with their integer representations on regression vectors.

#include <string>
#include <vector>

#include "rasch/model.hpp"

namespace rasch {

// g = (permutation, flips) acts on a setting by first exchanging 0 and 1 on
// the flipped rules, then moving rule i to position permutation[i].
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(std::vector<int> permutation, Subset flips);

  static GroupElement identity(int k);
  // "perm=2,1,3;flips=1,3" with 1-based rules; either part may be omitted.
  static GroupElement parse(const std::string& text, int k);

  int k() const { return static_cast<int>(permutation_.size()); }
  // 0-based images.
  const std::vector<int>& permutation() const { return permutation_; }
  Subset flips() const { return flips_; }

  BinarySetting act(const BinarySetting& x) const;
  // Image of a subset of rules under the permutation alone.
  Subset permute(Subset s) const;

  // (g * h) acts as g after h.
  friend GroupElement operator*(const GroupElement& g, const GroupElement& h);
  GroupElement inverse() const;

  std::string to_string() const;
  bool operator==(const GroupElement&) const = default;

 private:
  std::vector<int> permutation_;
  Subset flips_ = 0;
};

// Every element of S_k x Z_2^k. Requires k <= 6.
std::vector<GroupElement> all_group_elements(int k);

struct Representation {
  IntMatrix q;  // f(g x) = Q f(x)
  long long determinant = 0;
};

BinarySetting act_on_setting(const GroupElement& g, const BinarySetting& x);

// Exact integer solve of f(g x) = Q f(x), verified on all settings.
Representation representation_matrix(const GroupElement& g, const InteractionModel& m);

// beta' = Q^{-T} beta, so f(g x)^T beta' = f(x)^T beta. With
// zero_offset = true the result has beta'_{} reset to 0.
ParameterVector act_on_parameters(const GroupElement& g, const ParameterVector& theta,
                                  const InteractionModel& m, bool zero_offset = false);

// Mass at x moves to g x.
Design act_on_design(const GroupElement& g, const Design& w);

struct TransformationResidual {
  double max_entry_residual = 0.0;  // relative to max |Q M Q^T|
  double det_relative_difference = 0.0;
};

// Compares M(g w, g beta) with Q M(w, beta) Q^T.
TransformationResidual verify_transformation(const GroupElement& g, const Design& w,
                                             const ParameterVector& theta,
                                             const InteractionModel& m);

// Distinct parameter vectors g beta over the full group, in group
// enumeration order. Requires k <= 6.
std::vector<ParameterVector> parameter_orbit(const ParameterVector& theta,
                                             const InteractionModel& m);

// Exact determinant of an integer matrix (fraction-free elimination).
long long integer_determinant(const IntMatrix& a);

}  // namespace rasch

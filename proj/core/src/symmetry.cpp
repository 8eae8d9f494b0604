#include "rasch/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rasch/errors.hpp"

namespace rasch {

namespace {
__extension__ using WideInt = __int128;
}  // namespace

GroupElement::GroupElement(std::vector<int> permutation, Subset flips)
    : permutation_(std::move(permutation)), flips_(flips) {
  const int k = static_cast<int>(permutation_.size());
  if (k < 1 || k > kMaxRules) throw InvalidArgument("group element needs 1 <= k <= 63");
  std::vector<bool> seen(permutation_.size(), false);
  for (int image : permutation_) {
    if (image < 0 || image >= k || seen[static_cast<std::size_t>(image)]) {
      throw InvalidArgument("not a permutation of the rules");
    }
    seen[static_cast<std::size_t>(image)] = true;
  }
  if (k < 64 && (flips >> k) != 0) throw InvalidArgument("flip set beyond k");
}

GroupElement GroupElement::identity(int k) {
  std::vector<int> perm(static_cast<std::size_t>(std::max(k, 0)));
  std::iota(perm.begin(), perm.end(), 0);
  return {std::move(perm), 0};
}

GroupElement GroupElement::parse(const std::string& text, int k) {
  std::vector<int> perm(static_cast<std::size_t>(std::max(k, 0)));
  std::iota(perm.begin(), perm.end(), 0);
  Subset flips = 0;
  std::stringstream parts(text);
  std::string part;
  while (std::getline(parts, part, ';')) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw InvalidArgument("expected key=value in '" + part + "'");
    const std::string key = part.substr(0, eq);
    const std::string value = part.substr(eq + 1);
    if (key == "perm") {
      std::vector<int> parsed;
      std::stringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) {
        try {
          std::size_t used = 0;
          const int rule = std::stoi(item, &used);
          if (used != item.size()) throw InvalidArgument("bad permutation entry");
          parsed.push_back(rule - 1);
        } catch (const std::logic_error&) {
          throw InvalidArgument("bad permutation entry '" + item + "'");
        }
      }
      if (static_cast<int>(parsed.size()) != k) {
        throw InvalidArgument("permutation must list " + std::to_string(k) + " rules");
      }
      perm = std::move(parsed);
    } else if (key == "flips") {
      flips = parse_subset_label(value, k);
    } else {
      throw InvalidArgument("unknown group element key '" + key + "'");
    }
  }
  return {std::move(perm), flips};
}

Subset GroupElement::permute(Subset s) const {
  Subset out = 0;
  for (std::size_t i = 0; i < permutation_.size(); ++i) {
    if ((s >> i) & 1U) out |= Subset{1} << permutation_[i];
  }
  return out;
}

BinarySetting GroupElement::act(const BinarySetting& x) const {
  if (x.k() != k()) throw DimensionMismatch("group element and setting differ in k");
  return {x.k(), permute(x.mask() ^ flips_)};
}

GroupElement operator*(const GroupElement& g, const GroupElement& h) {
  if (g.k() != h.k()) throw DimensionMismatch("group elements differ in k");
  // g(h x) = sigma(F ^ tau(G ^ x)) = sigma tau(tau^{-1}(F) ^ G ^ x)
  std::vector<int> perm(g.permutation_.size());
  Subset preimage = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const int image = h.permutation_[i];
    perm[i] = g.permutation_[static_cast<std::size_t>(image)];
    if ((g.flips_ >> image) & 1U) preimage |= Subset{1} << i;
  }
  return {std::move(perm), h.flips_ ^ preimage};
}

GroupElement GroupElement::inverse() const {
  std::vector<int> perm(permutation_.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    perm[static_cast<std::size_t>(permutation_[i])] = static_cast<int>(i);
  }
  return {std::move(perm), permute(flips_)};
}

std::string GroupElement::to_string() const {
  std::string out = "perm=";
  for (std::size_t i = 0; i < permutation_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(permutation_[i] + 1);
  }
  out += ";flips=" + subset_label(flips_);
  return out;
}

std::vector<GroupElement> all_group_elements(int k) {
  if (k < 1 || k > 6) throw SizeGuardExceeded("group enumeration supports 1 <= k <= 6");
  std::vector<GroupElement> out;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (Subset flips = 0; flips < (Subset{1} << k); ++flips) out.emplace_back(perm, flips);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

BinarySetting act_on_setting(const GroupElement& g, const BinarySetting& x) { return g.act(x); }

long long integer_determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return 1;
  std::vector<std::vector<WideInt>> m(static_cast<std::size_t>(n),
                                       std::vector<WideInt>(static_cast<std::size_t>(n)));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a(i, j);
  }
  int sign = 1;
  WideInt previous = 1;
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t k = 0; k + 1 < un; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < un && m[swap][k] == 0) ++swap;
      if (swap == un) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < un; ++i) {
      for (std::size_t j = k + 1; j < un; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / previous;
      }
    }
    previous = m[k][k];
  }
  return sign * static_cast<long long>(m[un - 1][un - 1]);
}

Representation representation_matrix(const GroupElement& g, const InteractionModel& m) {
  if (g.k() != m.k()) throw DimensionMismatch("group element and model differ in k");
  const auto p = static_cast<Eigen::Index>(m.p());
  // Columns f(g x_B) for the corner settings x_B; their untransformed
  // counterparts form F^T, which has the integer inverse F^{-T}.
  IntMatrix images(p, p);
  for (Eigen::Index b = 0; b < p; ++b) {
    const BinarySetting x(m.k(), m.subset(static_cast<std::size_t>(b)));
    images.col(b) = integer_regression_vector(g.act(x), m);
  }
  Representation rep;
  rep.q = images * inverse_model_matrix(m).transpose();
  for_each_setting(m, [&](const BinarySetting& x) {
    if (integer_regression_vector(g.act(x), m) != rep.q * integer_regression_vector(x, m)) {
      throw Error("group action is not linear on regression vectors");
    }
  });
  rep.determinant = integer_determinant(rep.q);
  return rep;
}

ParameterVector act_on_parameters(const GroupElement& g, const ParameterVector& theta,
                                  const InteractionModel& m, bool zero_offset) {
  theta.check_model(m);
  const IntMatrix q_inverse = representation_matrix(g.inverse(), m).q;
  const Vector beta = q_inverse.cast<double>().transpose() * theta.as_vector();
  std::vector<double> out(beta.data(), beta.data() + beta.size());
  if (zero_offset) out[0] = 0.0;
  return {m, std::move(out)};
}

Design act_on_design(const GroupElement& g, const Design& w) {
  if (g.k() != w.k()) throw DimensionMismatch("group element and design differ in k");
  std::map<Subset, double> moved;
  for (const auto& [x, weight] : w.weights()) {
    moved.emplace(g.act(BinarySetting(w.k(), x)).mask(), weight);
  }
  return {w.k(), std::move(moved)};
}

TransformationResidual verify_transformation(const GroupElement& g, const Design& w,
                                             const ParameterVector& theta,
                                             const InteractionModel& m) {
  const Matrix q = representation_matrix(g, m).q.cast<double>();
  const Matrix expected = q * fisher_information(w, theta, m).dense() * q.transpose();
  const Matrix actual =
      fisher_information(act_on_design(g, w), act_on_parameters(g, theta, m), m).dense();
  TransformationResidual r;
  r.max_entry_residual =
      (actual - expected).cwiseAbs().maxCoeff() / std::max(expected.cwiseAbs().maxCoeff(), 1e-300);
  const double det_expected = expected.determinant();
  const double det_actual = actual.determinant();
  r.det_relative_difference =
      std::abs(det_actual - det_expected) / std::max(std::abs(det_expected), 1e-300);
  return r;
}

std::vector<ParameterVector> parameter_orbit(const ParameterVector& theta,
                                             const InteractionModel& m) {
  std::vector<ParameterVector> orbit;
  const double scale = std::max(1.0, theta.as_vector().cwiseAbs().maxCoeff());
  for (const GroupElement& g : all_group_elements(m.k())) {
    ParameterVector image = act_on_parameters(g, theta, m);
    const bool seen = std::any_of(orbit.begin(), orbit.end(), [&](const ParameterVector& other) {
      return (other.as_vector() - image.as_vector()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
    });
    if (!seen) orbit.push_back(std::move(image));
  }
  return orbit;
}

}  // namespace rasch

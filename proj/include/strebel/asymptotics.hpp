#pragma once
// Asymptotic distance between two rays from similar decompositions.
//
// For matched moduli m_j (left) and m'_j (right) the distance d(r(t), r'(t))
// converges to
//
//     max{ (1/2) log max_j max(m'_j/m_j, m_j/m'_j),  d_end }
//
// where d_end is the distance between the two limit points.  For rays that
// are not similar the distance diverges; divergence is a distinct result
// kind here, never a sentinel float.  Shifting the right ray's start by
// alpha rescales its moduli by e^{2 alpha}; the minimum over shifts is
// max{ delta/2, d_end } with the detour term
// delta = (1/2) log max_j (m'_j/m_j) + (1/2) log max_j (m_j/m'_j),
// attained at alpha* = (1/4) log( max_j (m_j/m'_j) / max_j (m'_j/m_j) ).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

#include "strebel/surface.hpp"

namespace strebel {

class AsymptoticResult {
 public:
  static AsymptoticResult finite(double modulus_term, double end_term) {
    AsymptoticResult r;
    r.divergent_ = false;
    r.modulus_term_ = modulus_term;
    r.end_term_ = end_term;
    return r;
  }
  static AsymptoticResult divergent() { return AsymptoticResult{}; }

  bool is_divergent() const { return divergent_; }
  double value() const {
    require_finite();
    return modulus_term_ > end_term_ ? modulus_term_ : end_term_;
  }
  double modulus_term() const {
    require_finite();
    return modulus_term_;
  }
  double end_term() const {
    require_finite();
    return end_term_;
  }

 private:
  void require_finite() const {
    if (divergent_)
      throw std::logic_error("AsymptoticResult: divergent result has no value");
  }
  bool divergent_ = true;
  double modulus_term_ = 0.0;
  double end_term_ = 0.0;
};

namespace detail {

// Largest ratio right/left over matched cylinders, ties broken toward the
// smallest index so contribution reports are deterministic.
struct RatioMax {
  double value = 0.0;
  std::size_t index = 0;
};

inline RatioMax max_ratio(const std::vector<double>& num,
                          const std::vector<double>& den) {
  RatioMax best{num[0] / den[0], 0};
  for (std::size_t j = 1; j < num.size(); ++j) {
    double r = num[j] / den[j];
    if (r > best.value) best = {r, j};
  }
  return best;
}

inline void check_moduli(const std::vector<double>& m,
                         const std::vector<double>& mp) {
  if (m.empty() || m.size() != mp.size())
    throw std::invalid_argument("matched moduli lists must be non-empty and equal length");
  for (std::size_t j = 0; j < m.size(); ++j)
    if (!(m[j] > 0.0) || !(mp[j] > 0.0))
      throw std::domain_error("moduli must be positive");
}

inline std::vector<double> left_moduli(const SimilarPair& p) {
  std::vector<double> m(p.cylinder_count());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = p.left_modulus(j);
  return m;
}

inline std::vector<double> right_moduli(const SimilarPair& p) {
  std::vector<double> m(p.cylinder_count());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = p.right_modulus(j);
  return m;
}

inline double end_distance_or_throw(const SimilarPair& p) {
  if (!p.end_distance)
    throw std::invalid_argument(
        "pair carries no end distance; supply end_distance to evaluate the limit");
  if (*p.end_distance < 0.0)
    throw std::domain_error("end distance must be non-negative");
  return *p.end_distance;
}

}  // namespace detail

// (1/2) log max_j max(m'_j/m_j, m_j/m'_j): the modulus contribution.
inline double modulus_ratio_term(const std::vector<double>& m,
                                 const std::vector<double>& mp) {
  detail::check_moduli(m, mp);
  auto up = detail::max_ratio(mp, m);
  auto down = detail::max_ratio(m, mp);
  return 0.5 * std::log(up.value > down.value ? up.value : down.value);
}

inline double modulus_ratio_term(const SimilarPair& p) {
  return modulus_ratio_term(detail::left_moduli(p), detail::right_moduli(p));
}

// delta = (1/2) log max_j (m'_j/m_j) + (1/2) log max_j (m_j/m'_j).
// Each summand may be negative on its own; the sum never is.
inline double detour_metric(const std::vector<double>& m,
                            const std::vector<double>& mp) {
  detail::check_moduli(m, mp);
  // the two sup ratios multiply to at least 1, so the sum of logs is
  // nonnegative up to rounding; clamp the last-ulp noise away
  return std::max(0.0, 0.5 * std::log(detail::max_ratio(mp, m).value) +
                           0.5 * std::log(detail::max_ratio(m, mp).value));
}

inline double detour_metric(const SimilarPair& p) {
  return detour_metric(detail::left_moduli(p), detail::right_moduli(p));
}

// alpha* = (1/4) log( max_j (m_j/m'_j) / max_j (m'_j/m_j) ): the start shift
// of the right ray equalizing the two one-sided maxima at e^{delta/2} each.
inline double optimal_shift(const std::vector<double>& m,
                            const std::vector<double>& mp) {
  detail::check_moduli(m, mp);
  return 0.25 * std::log(detail::max_ratio(m, mp).value /
                         detail::max_ratio(mp, m).value);
}

inline double optimal_shift(const SimilarPair& p) {
  return optimal_shift(detail::left_moduli(p), detail::right_moduli(p));
}

inline AsymptoticResult asymptotic_distance(const SimilarPair& p) {
  return AsymptoticResult::finite(modulus_ratio_term(p),
                                  detail::end_distance_or_throw(p));
}

inline AsymptoticResult asymptotic_distance(const SimilarityOutcome& outcome) {
  if (std::holds_alternative<NotSimilar>(outcome))
    return AsymptoticResult::divergent();
  return asymptotic_distance(std::get<SimilarPair>(outcome));
}

// Limit distance with the right ray reparametrized by t -> t + alpha, i.e.
// its moduli rescaled by e^{2 alpha}.  The end term is shift invariant.
inline AsymptoticResult shifted_asymptotic_distance(const SimilarPair& p,
                                                    double alpha) {
  const double end = detail::end_distance_or_throw(p);
  auto m = detail::left_moduli(p);
  auto mp = detail::right_moduli(p);
  const double scale = std::exp(2.0 * alpha);
  for (double& v : mp) v *= scale;
  return AsymptoticResult::finite(modulus_ratio_term(m, mp), end);
}

// Largest of the two proved lower bounds for the limit distance; for similar
// pairs this coincides with the limit value itself.
inline double lower_bound(const SimilarPair& p) {
  const double end = detail::end_distance_or_throw(p);
  const double mod = modulus_ratio_term(p);
  return mod > end ? mod : end;
}

}  // namespace strebel

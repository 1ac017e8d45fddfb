#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "liecv/lie_algebra.hpp"
#include "liecv/types.hpp"

namespace liecv {

namespace detail {

/// One aggregated Dynkin-series term: coefficient times the left-nested
/// bracket of a two-letter word (0 = first argument, 1 = second).
struct BchTerm {
  double coeff;
  std::vector<std::uint8_t> word;
};

/// Terms of the Campbell-Hausdorff series up to nested-bracket depth `order`,
/// aggregated by word. Sum over m of (-1)^(m-1)/m over block exponent tuples
/// (k_1,l_1,...,k_m,l_m), k_j+l_j >= 1, with weight 1/(n * prod k_j! l_j!)
/// where n is the word length and the word is x^{k_1} y^{l_1} ... x^{k_m} y^{l_m}.
inline const std::vector<BchTerm>& bch_terms(int order) {
  static std::map<int, std::vector<BchTerm>> cache;
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  std::map<std::vector<std::uint8_t>, double> agg;
  std::vector<double> fact{1};
  for (int i = 1; i <= order; ++i) fact.push_back(fact.back() * i);

  // enumerate block tuples recursively
  struct Rec {
    int order;
    const std::vector<double>& fact;
    std::map<std::vector<std::uint8_t>, double>& agg;
    std::vector<std::pair<int, int>> blocks;

    void run(int m_target, int used) {
      if (static_cast<int>(blocks.size()) == m_target) {
        if (used == 0) return;
        int n = used, m = m_target;
        double denom = m * n;
        std::vector<std::uint8_t> word;
        for (auto [k, l] : blocks) {
          denom *= fact[k] * fact[l];
          word.insert(word.end(), k, 0);
          word.insert(word.end(), l, 1);
        }
        double coeff = ((m - 1) % 2 ? -1.0 : 1.0) / denom;
        // words with equal first two letters have vanishing nested bracket
        if (word.size() >= 2 && word[0] == word[1]) return;
        agg[word] += coeff;
        return;
      }
      for (int k = 0; used + k <= order; ++k)
        for (int l = (k == 0 ? 1 : 0); used + k + l <= order; ++l) {
          blocks.push_back({k, l});
          run(m_target, used + k + l);
          blocks.pop_back();
        }
    }
  };

  for (int m = 1; m <= order; ++m) {
    Rec rec{order, fact, agg, {}};
    rec.run(m, 0);
  }

  std::vector<BchTerm> terms;
  for (auto& [word, coeff] : agg)
    if (std::abs(coeff) > 1e-15) terms.push_back({coeff, word});
  auto [pos, ok] = cache.emplace(order, std::move(terms));
  return pos->second;
}

}  // namespace detail

/// Campbell-Hausdorff composition in frame coefficients, truncated at nested
/// bracket depth `order`. Exact when the algebra is nilpotent of step <= order.
inline RVec bch_coeffs(const LieAlgebra& alg, const RVec& x, const RVec& y, int order) {
  if (order < 1) throw std::invalid_argument("bch_compose: order must be >= 1");
  RVec out = x + y;
  for (const auto& term : detail::bch_terms(order)) {
    if (term.word.size() < 2) continue;
    const RVec& w0 = term.word[0] ? y : x;
    const RVec& w1 = term.word[1] ? y : x;
    RVec b = alg.bracket_coeffs(w0, w1);
    bool dead = false;
    for (std::size_t i = 2; i < term.word.size(); ++i) {
      if (b.isZero(0)) { dead = true; break; }
      b = alg.bracket_coeffs(b, term.word[i] ? y : x);
    }
    if (!dead) out += term.coeff * b;
  }
  return out;
}

struct BchResult {
  GroupPoint point;
  /// true when the series does not terminate within `order` for this algebra
  bool truncated;
};

inline BchResult bch_compose(const GroupPoint& x, const GroupPoint& y, int order) {
  require_same_algebra(x, y);
  RVec out = bch_coeffs(*x.algebra, x.coeffs, y.coeffs, order);
  auto step = nilpotency_step(*x.algebra);
  bool truncated = !(step.has_value() && *step <= order);
  return BchResult{GroupPoint(x.algebra, std::move(out)), truncated};
}

/// exp(X)^{-1} = exp(-X): coordinate-wise negation.
inline GroupPoint group_inverse(const GroupPoint& x) {
  return GroupPoint(x.algebra, -x.coeffs);
}

}  // namespace liecv

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cuspidal/rational.hpp"

namespace cuspidal {

/// Module parameters: the rank n >= 2 and a rational n-vector a with
/// a_i not integral and a_i + a_j not integral for all i, j (so in
/// particular 2 a_i is never integral).
struct Params {
  int n = 0;
  std::vector<Scalar> a;

  Params() = default;
  Params(int rank, std::vector<Scalar> values) : n(rank), a(std::move(values)) {
    if (n < 2) throw ParameterError("rank must be at least 2");
    if (a.size() != static_cast<std::size_t>(n))
      throw ParameterError("parameter vector length must equal the rank");
    for (int i = 0; i < n; ++i) {
      if (is_integer(a[i]))
        throw ParameterError("a_" + std::to_string(i + 1) + " must not be an integer");
      for (int j = i; j < n; ++j)
        if (is_integer(a[i] + a[j]))
          throw ParameterError("a_" + std::to_string(i + 1) + " + a_" +
                               std::to_string(j + 1) + " must not be an integer");
    }
  }

  /// a = (1/3, 1/5, 1/7, ...). Non-integral with non-integral pairwise sums.
  static Params defaults(int rank) {
    std::vector<Scalar> a;
    for (int i = 0; i < rank; ++i) a.push_back(frac(1, 2 * i + 3));
    return Params(rank, std::move(a));
  }

  bool operator==(const Params& o) const { return n == o.n && a == o.a; }
  bool operator!=(const Params& o) const { return !(*this == o); }
};

/// Truncated support: all b in Z^n with even coordinate sum and |b_i| <= R,
/// in lexicographic order. Identities are only ever asserted where all the
/// lattice points they touch stay inside the box.
class SupportBox {
 public:
  SupportBox() = default;
  SupportBox(int n, int radius) : n_(n), radius_(radius) {
    if (n < 1 || radius < 1) throw ParameterError("support box needs n >= 1, R >= 1");
    std::vector<int> b(n, -radius);
    while (true) {
      int sum = 0;
      for (int v : b) sum += v;
      if (sum % 2 == 0) {
        index_.emplace(b, points_.size());
        points_.push_back(b);
      }
      int v = n - 1;
      while (v >= 0 && b[v] == radius) b[v--] = -radius;
      if (v < 0) break;
      ++b[v];
    }
  }

  int n() const { return n_; }
  int radius() const { return radius_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<std::vector<int>>& points() const { return points_; }
  const std::vector<int>& point(std::size_t i) const { return points_[i]; }

  std::optional<std::size_t> index_of(const std::vector<int>& b) const {
    auto it = index_.find(b);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::vector<int>& b) const { return index_.count(b) > 0; }

  static std::vector<int> shift(const std::vector<int>& b,
                                const std::vector<int>& by) {
    std::vector<int> r(b);
    for (std::size_t v = 0; v < r.size(); ++v) r[v] += by[v];
    return r;
  }

  /// Both b and b + by lie in the box.
  bool interior(const std::vector<int>& b, const std::vector<int>& by) const {
    return contains(b) && contains(shift(b, by));
  }

  bool operator==(const SupportBox& o) const {
    return n_ == o.n_ && radius_ == o.radius_;
  }

 private:
  int n_ = 0;
  int radius_ = 0;
  std::vector<std::vector<int>> points_;
  std::map<std::vector<int>, std::size_t> index_;
};

/// Weight of the lattice point b as a value vector on the fixed Cartan
/// basis [H(2e1), H(e2-e1), ..., H(en-e(n-1))].
inline std::vector<Scalar> weight_of(const Params& params,
                                     const std::vector<int>& b) {
  std::vector<Scalar> w;
  w.push_back(params.a[0] + Scalar(b[0]) + frac(1, 2));
  for (int i = 0; i + 1 < params.n; ++i)
    w.push_back(params.a[i + 1] + Scalar(b[i + 1]) - params.a[i] - Scalar(b[i]));
  return w;
}

}  // namespace cuspidal

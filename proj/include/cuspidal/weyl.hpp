#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cuspidal/matrix.hpp"

namespace cuspidal {

struct RealizationInconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exponent pair (alpha, beta) of a normal-ordered monomial x^alpha d^beta.
using WeylKey = std::pair<std::vector<int>, std::vector<int>>;

/// Element of the n-th Weyl algebra in normal order: a finite sum of terms
/// c * x^alpha d^beta with every x to the left of every d. Zero coefficients
/// are never stored.
class WeylElement {
 public:
  explicit WeylElement(int n_vars = 0) : n_(n_vars) {}

  static WeylElement one(int n) {
    WeylElement w(n);
    w.add_term(std::vector<int>(n, 0), std::vector<int>(n, 0), 1);
    return w;
  }

  static WeylElement constant(const Scalar& c, int n) {
    WeylElement w(n);
    w.add_term(std::vector<int>(n, 0), std::vector<int>(n, 0), c);
    return w;
  }

  /// x_i (1-based).
  static WeylElement x(int i, int n) {
    WeylElement w(n);
    std::vector<int> a(n, 0), b(n, 0);
    a[i - 1] = 1;
    w.add_term(a, b, 1);
    return w;
  }

  /// d/dx_i (1-based).
  static WeylElement d(int i, int n) {
    WeylElement w(n);
    std::vector<int> a(n, 0), b(n, 0);
    b[i - 1] = 1;
    w.add_term(a, b, 1);
    return w;
  }

  static WeylElement monomial(std::vector<int> xexp, std::vector<int> dexp,
                              const Scalar& c) {
    WeylElement w(static_cast<int>(xexp.size()));
    w.add_term(std::move(xexp), std::move(dexp), c);
    return w;
  }

  int vars() const { return n_; }
  const std::map<WeylKey, Scalar>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(std::vector<int> xexp, std::vector<int> dexp, const Scalar& c) {
    if (c == 0) return;
    WeylKey key{std::move(xexp), std::move(dexp)};
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(std::move(key), c);
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  WeylElement operator+(const WeylElement& o) const {
    require_same_vars(o);
    WeylElement r(*this);
    for (const auto& [key, c] : o.terms_) r.add_term(key.first, key.second, c);
    return r;
  }

  WeylElement operator-(const WeylElement& o) const {
    require_same_vars(o);
    WeylElement r(*this);
    for (const auto& [key, c] : o.terms_) r.add_term(key.first, key.second, -c);
    return r;
  }

  WeylElement operator*(const Scalar& c) const {
    WeylElement r(n_);
    if (c == 0) return r;
    for (const auto& [key, coeff] : terms_) r.terms_[key] = coeff * c;
    return r;
  }

  /// Normal-ordered product. For each pair of terms the commutation
  /// d^b x^g = sum_k binom(b,k) g!/(g-k)! x^{g-k} d^{b-k} is applied
  /// coordinatewise.
  WeylElement operator*(const WeylElement& o) const {
    require_same_vars(o);
    WeylElement r(n_);
    for (const auto& [ka, ca] : terms_) {
      for (const auto& [kb, cb] : o.terms_) {
        const auto& [ax, ad] = ka;
        const auto& [bx, bd] = kb;
        std::vector<int> kmax(n_);
        for (int v = 0; v < n_; ++v) kmax[v] = std::min(ad[v], bx[v]);
        std::vector<int> k(n_, 0);
        while (true) {
          Scalar factor = ca * cb;
          for (int v = 0; v < n_; ++v)
            factor *= binom_int(ad[v], k[v]) * falling(bx[v], k[v]);
          std::vector<int> rx(n_), rd(n_);
          for (int v = 0; v < n_; ++v) {
            rx[v] = ax[v] + bx[v] - k[v];
            rd[v] = ad[v] + bd[v] - k[v];
          }
          r.add_term(std::move(rx), std::move(rd), factor);
          int v = 0;
          while (v < n_ && k[v] == kmax[v]) k[v++] = 0;
          if (v == n_) break;
          ++k[v];
        }
      }
    }
    return r;
  }

  bool operator==(const WeylElement& o) const {
    return n_ == o.n_ && terms_ == o.terms_;
  }
  bool operator!=(const WeylElement& o) const { return !(*this == o); }

  std::string to_text() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [key, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += to_string(c);
      for (int v = 0; v < n_; ++v)
        for (int e = 0; e < key.first[v]; ++e) out += " x" + std::to_string(v + 1);
      for (int v = 0; v < n_; ++v)
        for (int e = 0; e < key.second[v]; ++e) out += " d" + std::to_string(v + 1);
    }
    return out;
  }

 private:
  static Scalar binom_int(int n, int k) {
    Scalar r = 1;
    for (int i = 0; i < k; ++i) r *= Scalar(n - i) / Scalar(i + 1);
    return r;
  }
  static Scalar falling(int n, int k) {
    Scalar r = 1;
    for (int i = 0; i < k; ++i) r *= Scalar(n - i);
    return r;
  }

  void require_same_vars(const WeylElement& o) const {
    if (n_ != o.n_) throw DimensionError("Weyl elements over different variable counts");
  }

  int n_;
  std::map<WeylKey, Scalar> terms_;
};

inline WeylElement weyl_product(const WeylElement& a, const WeylElement& b) {
  return a * b;
}

inline WeylElement weyl_commutator(const WeylElement& a, const WeylElement& b) {
  return a * b - b * a;
}

/// Action of a normal-ordered operator on the formal monomial x^{a+b}:
/// each d_i contributes a falling-factorial prefactor in (a_i + b_i) and
/// shifts b by -e_i, each x_i shifts b by +e_i. Requires every a_i to be
/// non-integral so that no prefactor can vanish by accident.
inline std::map<std::vector<int>, Scalar> apply_to_monomial(
    const WeylElement& w, const std::vector<Scalar>& a,
    const std::vector<int>& b) {
  const int n = w.vars();
  if (static_cast<int>(a.size()) != n || static_cast<int>(b.size()) != n)
    throw DimensionError("parameter/lattice size mismatch");
  for (const auto& ai : a)
    if (is_integer(ai)) throw ParameterError("monomial action needs non-integral parameters");
  std::map<std::vector<int>, Scalar> result;
  for (const auto& [key, c] : w.terms()) {
    const auto& [xexp, dexp] = key;
    Scalar factor = c;
    std::vector<int> target = b;
    for (int v = 0; v < n; ++v) {
      const Scalar base = a[v] + Scalar(b[v]);
      for (int e = 0; e < dexp[v]; ++e) factor *= base - Scalar(e);
      target[v] += xexp[v] - dexp[v];
    }
    auto [it, inserted] = result.emplace(std::move(target), factor);
    if (!inserted) {
      it->second += factor;
      if (it->second == 0) result.erase(it);
    }
  }
  return result;
}

/// One basis element of sp_2n in the Weyl realization: a root vector
/// X(root) or a Cartan element H(root), its weight on the lattice (zero for
/// Cartan elements), and its differential-operator image.
struct BasisElement {
  std::string label;
  std::vector<int> root;  // lattice shift for root vectors, zero for Cartans
  bool cartan = false;
  WeylElement image;
};

inline std::string root_to_string(const std::vector<int>& root) {
  std::string out;
  for (std::size_t v = 0; v < root.size(); ++v) {
    const int c = root[v];
    if (c == 0) continue;
    if (!out.empty() && c > 0) out += "+";
    if (c < 0) out += "-";
    if (std::abs(c) == 2) out += "2";
    out += "e" + std::to_string(v + 1);
  }
  return out.empty() ? "0" : out;
}

/// The fixed basis of sp_2n (2n^2 + n elements): root vectors for all roots
/// of type C_n, then the Cartan elements in the order H(2e1), H(e2-e1), ...,
/// H(en-e(n-1)). Weight vectors of lattice points are always reported on the
/// Cartan part in this order.
struct SpBasis {
  int n = 0;
  std::vector<BasisElement> elements;
  std::size_t cartan_start = 0;  // index of H(2e1)

  std::size_t size() const { return elements.size(); }

  const BasisElement& operator[](std::size_t i) const { return elements[i]; }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i].label == label) return i;
    throw ParameterError("unknown basis label: " + label);
  }

  std::size_t cartan_count() const { return elements.size() - cartan_start; }
};

inline SpBasis sp_basis(int n) {
  if (n < 2) throw ParameterError("sp basis needs rank n >= 2");
  SpBasis basis;
  basis.n = n;
  auto root = [n](int i, int ci, int j, int cj) {
    std::vector<int> r(n, 0);
    r[i - 1] += ci;
    if (j) r[j - 1] += cj;
    return r;
  };
  auto push = [&basis](std::vector<int> rt, bool cartan, WeylElement img) {
    BasisElement e;
    e.root = cartan ? std::vector<int>(rt.size(), 0) : rt;
    e.label = (cartan ? "H(" : "X(") + root_to_string(rt) + ")";
    e.cartan = cartan;
    e.image = std::move(img);
    basis.elements.push_back(std::move(e));
  };

  using W = WeylElement;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      if (i != j) push(root(i, 1, j, -1), false, W::x(i, n) * W::d(j, n));
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j)
      push(root(i, 1, j, 1), false, W::x(i, n) * W::x(j, n));
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j)
      push(root(i, -1, j, -1), false, W::d(i, n) * W::d(j, n));

  basis.cartan_start = basis.elements.size();
  // H(2e1) normal-ordered: (x1 d1 + d1 x1)/2 = x1 d1 + 1/2.
  push(root(1, 2, 0, 0), true,
       W::x(1, n) * W::d(1, n) + W::constant(frac(1, 2), n));
  for (int i = 1; i < n; ++i)
    push(root(i + 1, 1, i, -1), true,
         W::x(i + 1, n) * W::d(i + 1, n) - W::x(i, n) * W::d(i, n));
  return basis;
}

/// Sparse coefficient vector over the basis.
using BasisCoeffs = std::vector<std::pair<std::size_t, Scalar>>;

/// Commutator table of the realized basis: bracket(u, v) is the coefficient
/// vector of [image(u), image(v)] over the basis images. Computed, not
/// transcribed; failure to express a commutator in the span would contradict
/// the homomorphism property and raises an error.
struct StructureConstants {
  std::size_t dim = 0;
  std::vector<BasisCoeffs> table;  // row-major (u * dim + v)

  const BasisCoeffs& bracket(std::size_t u, std::size_t v) const {
    return table[u * dim + v];
  }

  /// Bilinear extension: bracket of two coefficient vectors.
  std::vector<Scalar> bracket_vectors(const std::vector<Scalar>& x,
                                      const std::vector<Scalar>& y) const {
    std::vector<Scalar> out(dim, Scalar(0));
    for (std::size_t u = 0; u < dim; ++u) {
      if (x[u] == 0) continue;
      for (std::size_t v = 0; v < dim; ++v) {
        if (y[v] == 0) continue;
        const Scalar f = x[u] * y[v];
        for (const auto& [w, c] : bracket(u, v)) out[w] += f * c;
      }
    }
    return out;
  }
};

inline StructureConstants structure_constants(const SpBasis& basis) {
  const std::size_t dim = basis.size();
  // Column space of the basis images over their joint monomial support.
  std::map<WeylKey, std::size_t> mono_index;
  for (const auto& e : basis.elements)
    for (const auto& [key, c] : e.image.terms())
      mono_index.emplace(key, mono_index.size());

  const std::size_t pairs = dim * dim;
  std::map<WeylKey, std::size_t> extra;  // monomials outside the span
  std::vector<WeylElement> commutators;
  commutators.reserve(pairs);
  for (std::size_t u = 0; u < dim; ++u)
    for (std::size_t v = 0; v < dim; ++v) {
      commutators.push_back(
          weyl_commutator(basis[u].image, basis[v].image));
      for (const auto& [key, c] : commutators.back().terms())
        if (!mono_index.count(key)) extra.emplace(key, extra.size());
    }
  if (!extra.empty())
    throw RealizationInconsistencyError(
        "commutator leaves the span of the basis images");

  Matrix aug(mono_index.size(), dim + pairs);
  for (std::size_t e = 0; e < dim; ++e)
    for (const auto& [key, c] : basis[e].image.terms())
      aug(mono_index.at(key), e) = c;
  for (std::size_t p = 0; p < pairs; ++p)
    for (const auto& [key, c] : commutators[p].terms())
      aug(mono_index.at(key), dim + p) = c;

  const auto pivots = aug.rref_in_place();
  for (auto p : pivots)
    if (p >= dim)
      throw RealizationInconsistencyError(
          "commutator not expressible over the basis images");
  if (pivots.size() != dim)
    throw RealizationInconsistencyError("basis images are linearly dependent");

  StructureConstants sc;
  sc.dim = dim;
  sc.table.resize(pairs);
  for (std::size_t p = 0; p < pairs; ++p)
    for (std::size_t row = 0; row < pivots.size(); ++row) {
      const Scalar& c = aug(row, dim + p);
      if (c != 0) sc.table[p].emplace_back(pivots[row], c);
    }
  return sc;
}

}  // namespace cuspidal

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cuspidal/matrix.hpp"

namespace cuspidal {

struct FamilyInvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// n pairwise commuting nilpotent matrices T_1..T_n of a common size; the
/// same data as a finite dimensional module over the power-series algebra
/// in n variables. Invariants are checked on construction.
struct NilpotentFamily {
  int n = 0;
  std::size_t dim = 0;
  std::vector<Matrix> mats;

  NilpotentFamily() = default;
  NilpotentFamily(int n_vars, std::vector<Matrix> matrices)
      : n(n_vars), mats(std::move(matrices)) {
    if (n < 1 || mats.size() != static_cast<std::size_t>(n))
      throw FamilyInvariantError("family needs one matrix per variable");
    dim = mats.front().rows();
    for (const auto& t : mats) {
      if (t.rows() != dim || t.cols() != dim)
        throw FamilyInvariantError("family matrices must share a square shape");
      if (!is_nilpotent(t))
        throw FamilyInvariantError("family matrix is not nilpotent");
    }
    for (std::size_t i = 0; i < mats.size(); ++i)
      for (std::size_t j = i + 1; j < mats.size(); ++j)
        if (mats[i] * mats[j] != mats[j] * mats[i])
          throw FamilyInvariantError("family matrices do not commute");
  }

  static NilpotentFamily zero(int n_vars, std::size_t d) {
    return NilpotentFamily(n_vars, std::vector<Matrix>(n_vars, Matrix(d, d)));
  }

  bool operator==(const NilpotentFamily& o) const {
    return n == o.n && dim == o.dim && mats == o.mats;
  }
};

/// Portable bounded draw (avoids std::uniform_int_distribution, which is
/// implementation-defined; reports must be reproducible from the seed).
inline long draw(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Strictly upper triangular matrix with ones on the superdiagonal and
/// random small entries above it.
inline Matrix random_nilpotent_seed(std::size_t dim, std::mt19937_64& rng) {
  Matrix s(dim, dim);
  for (std::size_t i = 0; i + 1 < dim; ++i) {
    s(i, i + 1) = 1;
    for (std::size_t j = i + 2; j < dim; ++j) s(i, j) = draw(rng, -2, 2);
  }
  return s;
}

/// Commuting nilpotent matrices generated as constant-free polynomials in a
/// single strictly upper triangular seed. Commutation and nilpotency hold by
/// construction; the family constructor re-checks both.
inline NilpotentFamily random_nilpotent_family(int n_vars, std::size_t dim,
                                               std::mt19937_64& rng) {
  const Matrix seed = random_nilpotent_seed(dim, rng);
  std::vector<Matrix> mats;
  for (int t = 0; t < n_vars; ++t) {
    std::vector<Scalar> coeff(dim, Scalar(0));  // coeff[0] stays 0
    for (std::size_t k = 1; k < dim; ++k) coeff[k] = draw(rng, -2, 2);
    mats.push_back(seed.eval_poly(coeff));
  }
  return NilpotentFamily(n_vars, std::move(mats));
}

inline NilpotentFamily random_nilpotent_family(int n_vars, std::size_t dim,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_nilpotent_family(n_vars, dim, rng);
}

/// Two commuting matrices (not necessarily nilpotent): polynomials in a
/// common random matrix.
inline std::pair<Matrix, Matrix> random_commuting_pair(std::size_t dim,
                                                       std::mt19937_64& rng) {
  Matrix seed(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) seed(i, j) = draw(rng, -2, 2);
  auto poly = [&] {
    std::vector<Scalar> coeff(dim);
    for (auto& c : coeff) c = draw(rng, -2, 2);
    return seed.eval_poly(coeff);
  };
  return {poly(), poly()};
}

/// Basis of the space of maps f with f T_i^{(src)} = T_i^{(dst)} f for all i,
/// flattened row-major into columns of the returned matrix. This is the
/// family-side hom space, solved directly as one nullspace computation; it
/// serves as the independent check against the module-side hom solver.
inline Matrix family_intertwiner_basis(const NilpotentFamily& src,
                                       const NilpotentFamily& dst) {
  if (src.n != dst.n)
    throw FamilyInvariantError("intertwiners need equal variable counts");
  const std::size_t ds = src.dim, dd = dst.dim;
  const std::size_t unknowns = dd * ds;
  Matrix sys(static_cast<std::size_t>(src.n) * unknowns, unknowns);
  std::size_t row = 0;
  for (int t = 0; t < src.n; ++t) {
    const Matrix& a = dst.mats[t];
    const Matrix& b = src.mats[t];
    // (a f - f b)_{r,c} = sum_{p,q} f_{p,q} (a_{r,p} [q==c] - [p==r] b_{q,c})
    for (std::size_t r = 0; r < dd; ++r)
      for (std::size_t c = 0; c < ds; ++c) {
        for (std::size_t p = 0; p < dd; ++p)
          sys(row, p * ds + c) += a(r, p);
        for (std::size_t q = 0; q < ds; ++q)
          sys(row, r * ds + q) -= b(q, c);
        ++row;
      }
  }
  return sys.nullspace();
}

inline std::size_t family_intertwiner_dim(const NilpotentFamily& src,
                                          const NilpotentFamily& dst) {
  return family_intertwiner_basis(src, dst).cols();
}

}  // namespace cuspidal

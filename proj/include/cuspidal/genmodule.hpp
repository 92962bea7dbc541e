#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "cuspidal/family.hpp"
#include "cuspidal/report.hpp"
#include "cuspidal/support.hpp"
#include "cuspidal/threading.hpp"
#include "cuspidal/weyl.hpp"

namespace cuspidal {

struct BlockMembershipError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InteriorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Block-indexed generalized weight module on a truncated support: one
/// matrix per (basis element, lattice point) pair, present whenever the
/// point and its shift by the element's weight both lie in the box.
class GenModule {
 public:
  GenModule(Params params, int radius)
      : params_(std::move(params)),
        box_(params_.n, radius),
        basis_(sp_basis(params_.n)),
        dims_(box_.size(), 0),
        blocks_(basis_.size(), std::vector<Matrix>(box_.size())) {}

  const Params& params() const { return params_; }
  const SupportBox& box() const { return box_; }
  const SpBasis& basis() const { return basis_; }

  std::size_t dim_at(std::size_t point) const { return dims_[point]; }
  void set_dim(std::size_t point, std::size_t d) { dims_[point] = d; }

  std::size_t origin() const {
    return *box_.index_of(std::vector<int>(params_.n, 0));
  }

  bool has_block(std::size_t elem, std::size_t point) const {
    return box_.contains(
        SupportBox::shift(box_.point(point), basis_[elem].root));
  }

  const Matrix& block(std::size_t elem, std::size_t point) const {
    return blocks_[elem][point];
  }

  void set_block(std::size_t elem, std::size_t point, Matrix m) {
    blocks_[elem][point] = std::move(m);
  }

  /// Target point index of a block, if inside the box.
  std::optional<std::size_t> target(std::size_t elem, std::size_t point) const {
    return box_.index_of(SupportBox::shift(box_.point(point), basis_[elem].root));
  }

  /// Copy with a single block entry bumped by delta; used for fault
  /// injection in the verification drivers.
  GenModule perturbed(std::size_t elem, std::size_t point,
                      const Scalar& delta) const {
    GenModule m(*this);
    m.blocks_[elem][point](0, 0) += delta;
    return m;
  }

  bool operator==(const GenModule& o) const {
    return params_ == o.params_ && box_ == o.box_ && dims_ == o.dims_ &&
           blocks_ == o.blocks_;
  }

 private:
  Params params_;
  SupportBox box_;
  SpBasis basis_;
  std::vector<std::size_t> dims_;
  std::vector<std::vector<Matrix>> blocks_;  // [element][point]
};

/// The completely pointed module N(a) on the truncated support: every block
/// is the 1x1 matrix of the closed-form action table.
inline GenModule build_N(const Params& params, int radius) {
  GenModule m(params, radius);
  const auto& box = m.box();
  const auto& basis = m.basis();
  const int n = params.n;
  for (std::size_t p = 0; p < box.size(); ++p) m.set_dim(p, 1);
  for (std::size_t p = 0; p < box.size(); ++p) {
    const auto& b = box.point(p);
    auto ab = [&](int i) { return params.a[i] + Scalar(b[i]); };
    for (std::size_t e = 0; e < basis.size(); ++e) {
      if (!m.has_block(e, p)) continue;
      const auto& root = basis[e].root;
      Scalar value;
      if (basis[e].cartan) {
        // H(2e1) first, then the consecutive differences.
        if (e == basis.cartan_start) {
          value = ab(0) + frac(1, 2);
        } else {
          const int i = static_cast<int>(e - basis.cartan_start) - 1;
          value = ab(i + 1) - ab(i);
        }
      } else {
        int pos = 0, neg = 0;
        for (int v = 0; v < n; ++v) {
          pos += std::max(root[v], 0);
          neg += std::max(-root[v], 0);
        }
        if (neg == 0) {
          value = 1;  // raising: x_i x_j
        } else if (pos == 0) {
          // lowering: product of one falling factor per d.
          value = 1;
          for (int v = 0; v < n; ++v)
            for (int k = 0; k < -root[v]; ++k) value *= ab(v) - Scalar(k);
        } else {
          // x_i d_j: the factor of the variable being lowered.
          value = 1;
          for (int v = 0; v < n; ++v)
            if (root[v] < 0) value *= ab(v);
        }
      }
      Matrix blk(1, 1);
      blk(0, 0) = value;
      m.set_block(e, p, std::move(blk));
    }
  }
  return m;
}

/// Independent route to N(a): apply each basis element's Weyl image to the
/// formal monomial at every lattice point. Must agree with build_N blockwise.
inline GenModule build_N_via_weyl(const Params& params, int radius) {
  GenModule m(params, radius);
  const auto& box = m.box();
  const auto& basis = m.basis();
  for (std::size_t p = 0; p < box.size(); ++p) m.set_dim(p, 1);
  for (std::size_t p = 0; p < box.size(); ++p) {
    for (std::size_t e = 0; e < basis.size(); ++e) {
      if (!m.has_block(e, p)) continue;
      const auto result = apply_to_monomial(basis[e].image, params.a, box.point(p));
      const auto tgt = SupportBox::shift(box.point(p), basis[e].root);
      Matrix blk(1, 1);
      for (const auto& [point, coeff] : result) {
        if (point != tgt)
          throw RealizationInconsistencyError(
              "monomial action off the expected shift for " + basis[e].label);
        blk(0, 0) = coeff;
      }
      m.set_block(e, p, std::move(blk));
    }
  }
  return m;
}

/// The functor F on objects: turns a commuting nilpotent family into a
/// cuspidal generalized weight module. Writing A_i(b) = T_i + (a_i+b_i) Id,
/// the block of a root vector is the corresponding product of the A_i(b),
/// raising blocks are the identity, and the Cartan blocks are A-differences.
/// The long lowering root acts by A_i(b)(A_i(b) - Id) into the -2e_i
/// direction, matching the completely pointed table at the zero family.
inline GenModule build_F(const NilpotentFamily& family, const Params& params,
                         int radius) {
  if (family.n != params.n)
    throw ParameterError("family variable count must match the rank");
  GenModule m(params, radius);
  const auto& box = m.box();
  const auto& basis = m.basis();
  const int n = params.n;
  const std::size_t d = family.dim;
  const Matrix id = Matrix::identity(d);
  for (std::size_t p = 0; p < box.size(); ++p) m.set_dim(p, d);
  for (std::size_t p = 0; p < box.size(); ++p) {
    const auto& b = box.point(p);
    auto A = [&](int i) {
      return family.mats[i].shifted(params.a[i] + Scalar(b[i]));
    };
    for (std::size_t e = 0; e < basis.size(); ++e) {
      if (!m.has_block(e, p)) continue;
      const auto& root = basis[e].root;
      Matrix blk;
      if (basis[e].cartan) {
        if (e == basis.cartan_start) {
          blk = A(0).shifted(frac(1, 2));
        } else {
          const int i = static_cast<int>(e - basis.cartan_start) - 1;
          blk = A(i + 1) - A(i);
        }
      } else {
        int pos = 0, neg = 0;
        for (int v = 0; v < n; ++v) {
          pos += std::max(root[v], 0);
          neg += std::max(-root[v], 0);
        }
        if (neg == 0) {
          blk = id;
        } else if (pos == 0) {
          blk = id;
          for (int v = 0; v < n; ++v) {
            if (root[v] == -1) blk = blk * A(v);
            if (root[v] == -2) blk = blk * A(v) * A(v).shifted(-1);
          }
        } else {
          blk = id;
          for (int v = 0; v < n; ++v)
            if (root[v] < 0) blk = blk * A(v);
        }
      }
      m.set_block(e, p, std::move(blk));
    }
  }
  return m;
}

/// Checks every defining relation [u, v] = sum of structure constants on
/// every lattice point whose composed blocks stay inside the box. Work is
/// distributed over ordered basis pairs; violations are merged back in
/// deterministic pair order.
inline VerificationReport check_relations(const GenModule& m,
                                          const StructureConstants& sc) {
  const auto& basis = m.basis();
  const auto& box = m.box();
  const std::size_t dim = basis.size();
  const std::size_t pairs = dim * dim;
  std::vector<VerificationReport> parts(pairs);

  parallel_chunks(pairs, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t pair = lo; pair < hi; ++pair) {
      const std::size_t u = pair / dim, v = pair % dim;
      VerificationReport& rep = parts[pair];
      for (std::size_t p = 0; p < box.size(); ++p) {
        const auto& b = box.point(p);
        const auto bv = SupportBox::shift(b, basis[v].root);
        const auto bu = SupportBox::shift(b, basis[u].root);
        const auto buv = SupportBox::shift(bu, basis[v].root);
        const auto pv = box.index_of(bv);
        const auto pu = box.index_of(bu);
        if (!pv || !pu || !box.contains(buv)) continue;
        const Matrix lhs = m.block(u, *pv) * m.block(v, p) -
                           m.block(v, *pu) * m.block(u, p);
        Matrix rhs(m.dim_at(*box.index_of(buv)), m.dim_at(p));
        for (const auto& [w, c] : sc.bracket(u, v))
          rhs = rhs + m.block(w, p) * c;
        ++rep.checks;
        if (lhs != rhs)
          rep.violations.push_back(
              {basis[u].label, basis[v].label, b, lhs, rhs, "relation"});
      }
    }
  });

  VerificationReport merged;
  for (auto& part : parts) merged.merge(std::move(part));
  return merged;
}

/// Cuspidality on the truncation: every root-vector block between interior
/// points must be square and invertible.
inline VerificationReport check_cuspidal(const GenModule& m) {
  VerificationReport rep;
  const auto& basis = m.basis();
  const auto& box = m.box();
  for (std::size_t e = 0; e < basis.size(); ++e) {
    if (basis[e].cartan) continue;
    for (std::size_t p = 0; p < box.size(); ++p) {
      if (!m.has_block(e, p)) continue;
      ++rep.checks;
      const Matrix& blk = m.block(e, p);
      if (!blk.is_square() || !blk.is_invertible())
        rep.violations.push_back({basis[e].label, "", box.point(p), blk,
                                  Matrix(), "not invertible"});
    }
  }
  return rep;
}

/// Generalized-weight structure: at every point the Cartan blocks commute
/// pairwise and each has the single eigenvalue dictated by the weight of
/// the point.
inline VerificationReport check_weight_structure(const GenModule& m) {
  VerificationReport rep;
  const auto& basis = m.basis();
  const auto& box = m.box();
  for (std::size_t p = 0; p < box.size(); ++p) {
    const auto lambda = weight_of(m.params(), box.point(p));
    for (std::size_t h = 0; h < basis.cartan_count(); ++h) {
      const std::size_t e = basis.cartan_start + h;
      ++rep.checks;
      if (!has_single_eigenvalue(m.block(e, p), lambda[h]))
        rep.violations.push_back({basis[e].label, "", box.point(p),
                                  m.block(e, p), Matrix(),
                                  "eigenvalue != " + to_string(lambda[h])});
      for (std::size_t h2 = h + 1; h2 < basis.cartan_count(); ++h2) {
        const std::size_t e2 = basis.cartan_start + h2;
        ++rep.checks;
        if (m.block(e, p) * m.block(e2, p) != m.block(e2, p) * m.block(e, p))
          rep.violations.push_back({basis[e].label, basis[e2].label,
                                    box.point(p), Matrix(), Matrix(),
                                    "Cartan blocks do not commute"});
      }
    }
  }
  return rep;
}

/// A module is weight (not just generalized weight) iff every Cartan block
/// is a scalar matrix.
inline bool is_weight_module(const GenModule& m) {
  const auto& basis = m.basis();
  for (std::size_t h = basis.cartan_start; h < basis.size(); ++h)
    for (std::size_t p = 0; p < m.box().size(); ++p)
      if (!m.block(h, p).is_scalar_multiple_of_identity()) return false;
  return true;
}

/// Reads the commuting nilpotent family back off the Cartan blocks at the
/// origin: T_1 = Y_1 - (a_1 + 1/2) Id and T_i = Y_i + T_{i-1} - (a_i -
/// a_{i-1}) Id, where Y_1, .., Y_n are the Cartan actions in basis order.
/// A non-nilpotent result means the module does not live over these
/// parameters.
inline NilpotentFamily extract_T(const GenModule& m) {
  const auto& basis = m.basis();
  const Params& params = m.params();
  const std::size_t o = m.origin();
  std::vector<Matrix> ts;
  Matrix y1 = m.block(basis.cartan_start, o);
  ts.push_back(y1.shifted(-(params.a[0] + frac(1, 2))));
  for (int i = 1; i < params.n; ++i) {
    const Matrix yi = m.block(basis.cartan_start + i, o);
    ts.push_back(yi + ts.back() - (params.a[i] - params.a[i - 1]) *
                                      Matrix::identity(yi.rows()));
  }
  for (const auto& t : ts)
    if (!is_nilpotent(t))
      throw BlockMembershipError(
          "extracted operator is not nilpotent; wrong parameter block");
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j)
      if (ts[i] * ts[j] != ts[j] * ts[i])
        throw BlockMembershipError("extracted operators do not commute");
  return NilpotentFamily(params.n, std::move(ts));
}

/// A weight-preserving family of block maps, one per lattice point.
struct HomSolution {
  std::vector<Matrix> maps;  // indexed by box point
};

namespace detail {

/// Expresses every phi_b as a linear map of the phi_0 entries by
/// transporting the origin block along invertible root actions of the
/// source module. Returns, per point, one coefficient matrix per phi_0
/// entry.
inline std::vector<std::vector<Matrix>> transport_tensors(const GenModule& m1,
                                                          const GenModule& m2) {
  const auto& box = m1.box();
  const auto& basis = m1.basis();
  const std::size_t o = m1.origin();
  const std::size_t d1 = m1.dim_at(o), d2 = m2.dim_at(o);
  const std::size_t k0 = d1 * d2;
  std::vector<std::vector<Matrix>> tensors(box.size());
  tensors[o].resize(k0);
  for (std::size_t s = 0; s < k0; ++s)
    tensors[o][s] = Matrix::unit(d2, d1, s / d1, s % d1);

  std::queue<std::size_t> frontier;
  frontier.push(o);
  while (!frontier.empty()) {
    const std::size_t p = frontier.front();
    frontier.pop();
    for (std::size_t e = 0; e < basis.size(); ++e) {
      if (basis[e].cartan || !m1.has_block(e, p)) continue;
      const std::size_t q = *m1.target(e, p);
      if (!tensors[q].empty()) continue;
      const Matrix& src = m1.block(e, p);
      if (!src.is_invertible()) continue;
      const Matrix inv = src.inverse();
      const Matrix& dst = m2.block(e, p);
      tensors[q].resize(k0);
      for (std::size_t s = 0; s < k0; ++s)
        tensors[q][s] = dst * tensors[p][s] * inv;
      frontier.push(q);
    }
  }
  for (const auto& t : tensors)
    if (t.empty())
      throw ParameterError(
          "hom solver needs invertible root actions reaching every point");
  return tensors;
}

}  // namespace detail

/// Exact basis of the space of module homomorphisms M1 -> M2 (families of
/// block maps intertwining every basis action on the interior). All the
/// intertwining constraints are stacked into one exact nullspace problem
/// over the origin block.
inline std::vector<HomSolution> hom_space(const GenModule& m1,
                                          const GenModule& m2) {
  if (m1.params() != m2.params() || !(m1.box() == m2.box()))
    throw ParameterError("hom space needs matching parameters and box");
  const auto& box = m1.box();
  const auto& basis = m1.basis();
  const auto tensors = detail::transport_tensors(m1, m2);
  const std::size_t k0 = tensors[m1.origin()].size();

  std::vector<std::vector<Scalar>> rows;
  for (std::size_t e = 0; e < basis.size(); ++e) {
    for (std::size_t p = 0; p < box.size(); ++p) {
      if (!m1.has_block(e, p)) continue;
      const std::size_t q = *m1.target(e, p);
      std::vector<Matrix> residual(k0);
      for (std::size_t s = 0; s < k0; ++s)
        residual[s] =
            m2.block(e, p) * tensors[p][s] - tensors[q][s] * m1.block(e, p);
      const std::size_t rr = residual[0].rows(), rc = residual[0].cols();
      for (std::size_t i = 0; i < rr; ++i)
        for (std::size_t j = 0; j < rc; ++j) {
          std::vector<Scalar> row(k0);
          bool nonzero = false;
          for (std::size_t s = 0; s < k0; ++s) {
            row[s] = residual[s](i, j);
            nonzero = nonzero || row[s] != 0;
          }
          if (nonzero) rows.push_back(std::move(row));
        }
    }
  }

  Matrix sys(rows.size(), k0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t s = 0; s < k0; ++s) sys(r, s) = rows[r][s];
  const Matrix kernel = rows.empty() ? Matrix::identity(k0) : sys.nullspace();

  std::vector<HomSolution> out;
  for (std::size_t col = 0; col < kernel.cols(); ++col) {
    HomSolution sol;
    sol.maps.resize(box.size());
    for (std::size_t p = 0; p < box.size(); ++p) {
      Matrix phi(tensors[p][0].rows(), tensors[p][0].cols());
      for (std::size_t s = 0; s < k0; ++s)
        if (kernel(s, col) != 0) phi = phi + tensors[p][s] * kernel(s, col);
      sol.maps[p] = std::move(phi);
    }
    out.push_back(std::move(sol));
  }
  return out;
}

/// Searches the hom space for an invertible member. Candidates are scanned
/// over the integer grid {0..d}^k; since the determinant at the origin block
/// is a polynomial of degree at most d in each coordinate, an empty scan
/// certifies that no invertible combination exists.
inline std::optional<HomSolution> iso_check(const GenModule& m1,
                                            const GenModule& m2) {
  if (m1.params() != m2.params() || !(m1.box() == m2.box()))
    throw ParameterError("iso check needs matching parameters and box");
  const auto& box = m1.box();
  for (std::size_t p = 0; p < box.size(); ++p)
    if (m1.dim_at(p) != m2.dim_at(p)) return std::nullopt;

  if (m1 == m2) {
    HomSolution identity;
    for (std::size_t p = 0; p < box.size(); ++p)
      identity.maps.push_back(Matrix::identity(m1.dim_at(p)));
    return identity;
  }

  const auto sols = hom_space(m1, m2);
  if (sols.empty()) return std::nullopt;
  const std::size_t o = m1.origin();
  const std::size_t d = m1.dim_at(o);
  const std::size_t k = sols.size();

  double grid_size = 1;
  for (std::size_t i = 0; i < k; ++i) grid_size *= static_cast<double>(d + 1);
  if (grid_size > 2e6)
    throw ParameterError("iso check grid too large to certify");

  std::vector<std::size_t> c(k, 0);
  while (true) {
    std::size_t v = 0;
    while (v < k && c[v] == d) c[v++] = 0;
    if (v == k) break;
    ++c[v];
    Matrix cand(d, d);
    for (std::size_t s = 0; s < k; ++s)
      if (c[s] != 0)
        cand = cand + sols[s].maps[o] * Scalar(static_cast<long>(c[s]));
    if (!cand.is_invertible()) continue;
    HomSolution combo;
    combo.maps.resize(box.size());
    bool all_invertible = true;
    for (std::size_t p = 0; p < box.size(); ++p) {
      Matrix phi(m2.dim_at(p), m1.dim_at(p));
      for (std::size_t s = 0; s < k; ++s)
        if (c[s] != 0)
          phi = phi + sols[s].maps[p] * Scalar(static_cast<long>(c[s]));
      all_invertible = all_invertible && phi.is_invertible();
      combo.maps[p] = std::move(phi);
    }
    if (all_invertible) return combo;
  }
  return std::nullopt;
}

/// Enumerates all products of at most degree_cap root vectors with zero
/// total root whose intermediate points stay in the box, evaluated on the
/// origin block, and checks that the resulting operators commute pairwise.
inline VerificationReport u0_commutes(const GenModule& m, int degree_cap) {
  const auto& basis = m.basis();
  const auto& box = m.box();
  struct Op {
    std::string name;
    Matrix mat;
  };
  std::vector<Op> ops;
  const std::vector<int> zero(m.params().n, 0);

  // DFS in application order; the display name lists factors in operator
  // order (last applied leftmost).
  std::vector<std::string> labels;
  std::function<void(const std::vector<int>&, const Matrix&, int)> extend =
      [&](const std::vector<int>& at, const Matrix& acc, int depth) {
        if (depth > 0 && at == zero) {
          std::string name;
          for (auto it = labels.rbegin(); it != labels.rend(); ++it)
            name += (name.empty() ? "" : "*") + *it;
          ops.push_back({std::move(name), acc});
        }
        if (depth == degree_cap) return;
        for (std::size_t e = 0; e < basis.size(); ++e) {
          if (basis[e].cartan) continue;
          const auto p = box.index_of(at);
          if (!m.has_block(e, *p)) continue;
          labels.push_back(basis[e].label);
          extend(SupportBox::shift(at, basis[e].root),
                 m.block(e, *p) * acc, depth + 1);
          labels.pop_back();
        }
      };
  if (degree_cap > 0)
    extend(zero, Matrix::identity(m.dim_at(m.origin())), 0);

  const std::size_t count = ops.size();
  const std::size_t pairs = count * count;
  std::vector<VerificationReport> parts;
  if (pairs > 0) {
    parts.resize(pairs);
    parallel_chunks(pairs, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t pr = lo; pr < hi; ++pr) {
        const std::size_t i = pr / count, j = pr % count;
        if (i >= j) continue;
        VerificationReport& rep = parts[pr];
        ++rep.checks;
        const Matrix ab = ops[i].mat * ops[j].mat;
        const Matrix ba = ops[j].mat * ops[i].mat;
        if (ab != ba)
          rep.violations.push_back(
              {ops[i].name, ops[j].name, zero, ab, ba, "U0 commutator"});
      }
    });
  }
  VerificationReport merged;
  for (auto& part : parts) merged.merge(std::move(part));
  return merged;
}

/// One self-extension of N(a) per variable: the two-dimensional family with
/// a single Jordan block in slot i and zeros elsewhere, pushed through F.
inline std::vector<GenModule> self_extension_family(const Params& params,
                                                    int radius) {
  std::vector<GenModule> out;
  for (int i = 0; i < params.n; ++i) {
    std::vector<Matrix> mats(params.n, Matrix(2, 2));
    mats[i](0, 1) = 1;
    out.push_back(build_F(NilpotentFamily(params.n, std::move(mats)), params,
                          radius));
  }
  return out;
}

}  // namespace cuspidal

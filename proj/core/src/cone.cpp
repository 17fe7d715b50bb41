#include "pielab/cone.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pielab {

int SDPProblem::add_psd_block(int size) {
  if (size < 0) throw std::invalid_argument("psd block size must be >= 0");
  block_sizes_.push_back(size);
  return int(block_sizes_.size()) - 1;
}

int SDPProblem::entry_var(int block, int row, int col) {
  if (block < 0 || block >= int(block_sizes_.size())) {
    throw std::invalid_argument("unknown psd block");
  }
  if (row > col) std::swap(row, col);
  if (row < 0 || col >= block_sizes_[std::size_t(block)]) {
    throw std::invalid_argument("gram slot outside block");
  }
  auto key = std::make_tuple(block, row, col);
  auto it = slot_index_.find(key);
  if (it != slot_index_.end()) return it->second;
  const int id = int(slots_.size());
  slots_.push_back({block, row, col});
  slot_index_.emplace(key, id);
  return id;
}

void SDPProblem::add_equalities(std::vector<LinearEq> eqs) {
  for (auto& eq : eqs) equalities_.push_back(std::move(eq));
}

std::map<int, double> SDPProblem::assignment(
    const std::vector<Eigen::MatrixXd>& gram) const {
  if (gram.size() != block_sizes_.size()) {
    throw std::invalid_argument("assignment needs one matrix per block");
  }
  std::map<int, double> vals;
  for (int id = 0; id < var_count(); ++id) {
    const Slot& sl = slots_[std::size_t(id)];
    vals[id] = gram[std::size_t(sl.block)](sl.row, sl.col);
  }
  return vals;
}

namespace {

// z_d(v) kron selected channels: rows indexed (monomial, listed state).
PolyMat channel_monomials(Var v, int n, int d, const std::vector<int>& states) {
  const int k = int(states.size());
  PolyMat z((d + 1) * k, n);
  for (int m = 0; m <= d; ++m) {
    const Mono key = mono(v == Var::S ? unsigned(m) : 0,
                          v == Var::Theta ? unsigned(m) : 0,
                          v == Var::Nu ? unsigned(m) : 0);
    for (int c = 0; c < k; ++c) {
      z.at(m * k + c, states[std::size_t(c)]) =
          Poly::monomial(key, AffineCoeff(1.0));
    }
  }
  return z;
}

// {va^i vb^j : i,j <= d} kron I_n.
PolyMat grid_monomials(Var va, Var vb, int n, int d) {
  auto exp_of = [](Var v, Var want, int e) {
    return v == want ? unsigned(e) : 0u;
  };
  PolyMat z((d + 1) * (d + 1) * n, n);
  for (int i = 0; i <= d; ++i) {
    for (int j = 0; j <= d; ++j) {
      const Mono key = mono(exp_of(va, Var::S, i) + exp_of(vb, Var::S, j),
                            exp_of(va, Var::Theta, i) + exp_of(vb, Var::Theta, j),
                            exp_of(va, Var::Nu, i) + exp_of(vb, Var::Nu, j));
      for (int c = 0; c < n; ++c) {
        z.at((i * (d + 1) + j) * n + c, c) = Poly::monomial(key, AffineCoeff(1.0));
      }
    }
  }
  return z;
}

PolyMat scale_each(const Poly& g, const PolyMat& m) {
  PolyMat r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) r.at(i, j) = poly_mul(g, m.at(i, j));
  }
  return r;
}

// (v - a)(b - v)
Poly bump_weight(Var v, double a, double b) {
  const unsigned i = v == Var::S ? 1 : 0;
  const unsigned j = v == Var::Theta ? 1 : 0;
  const unsigned k = v == Var::Nu ? 1 : 0;
  Poly lin(-a);
  lin.add(Poly::monomial(mono(i, j, k), AffineCoeff(1.0)));
  Poly neg(b);
  neg.add(Poly::monomial(mono(i, j, k), AffineCoeff(-1.0)));
  return poly_mul(lin, neg);
}

struct GramView {
  PolyMat p11, p12, p13, p21, p22, p23, p31, p32, p33;
};

GramView split_gram(const PolyMat& g, int q1, int q2) {
  GramView v;
  v.p11 = g.block(0, 0, q1, q1);
  v.p12 = g.block(0, q1, q1, q2);
  v.p13 = g.block(0, q1 + q2, q1, q2);
  v.p21 = g.block(q1, 0, q2, q1);
  v.p22 = g.block(q1, q1, q2, q2);
  v.p23 = g.block(q1, q1 + q2, q2, q2);
  v.p31 = g.block(q1 + q2, 0, q2, q1);
  v.p32 = g.block(q1 + q2, q1, q2, q2);
  v.p33 = g.block(q1 + q2, q1 + q2, q2, q2);
  return v;
}

}  // namespace

PosPIVar declare_pos_pivar(SDPProblem& prob, int n, int d, double a, double b) {
  std::vector<int> all(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(all.begin(), all.end(), 0);
  return declare_pos_pivar_support(prob, n, d, a, b, all);
}

PosPIVar declare_pos_pivar_support(SDPProblem& prob, int n, int d, double a,
                                   double b,
                                   const std::vector<int>& mult_states) {
  if (n < 1 || d < 0) throw std::invalid_argument("pos pivar needs n>=1, d>=0");
  for (int s : mult_states) {
    if (s < 0 || s >= n)
      throw std::invalid_argument("pos pivar multiplier state out of range");
  }
  const int q1 = int(mult_states.size()) * (d + 1);
  const int q2 = n * (d + 1) * (d + 1);
  const int size = q1 + 2 * q2;

  PosPIVar var;
  var.n = n;
  var.d = d;
  var.block_unit = prob.add_psd_block(size);
  var.block_weighted = prob.add_psd_block(size);

  const PolyMat z1_s = channel_monomials(Var::S, n, d, mult_states);
  const PolyMat z1_th = channel_monomials(Var::Theta, n, d, mult_states);
  const PolyMat z2_s_th = grid_monomials(Var::S, Var::Theta, n, d);
  const PolyMat z2_th_s = grid_monomials(Var::Theta, Var::S, n, d);
  const PolyMat z2_nu_s = grid_monomials(Var::Nu, Var::S, n, d);
  const PolyMat z2_nu_th = grid_monomials(Var::Nu, Var::Theta, n, d);

  PolyMat n0(n, n), n1(n, n), n2(n, n);
  for (int block : {var.block_unit, var.block_weighted}) {
    PolyMat gram(size, size);
    for (int i = 0; i < size; ++i) {
      for (int j = i; j < size; ++j) {
        Poly v = Poly::variable_coeff(prob.entry_var(block, i, j));
        gram.at(i, j) = v;
        gram.at(j, i) = v;
      }
    }
    GramView p = split_gram(gram, q1, q2);

    const bool weighted = block == var.block_weighted;
    const Poly g_s = weighted ? bump_weight(Var::S, a, b) : Poly(1.0);
    const Poly g_th = weighted ? bump_weight(Var::Theta, a, b) : Poly(1.0);
    const Poly g_nu = weighted ? bump_weight(Var::Nu, a, b) : Poly(1.0);

    n0 = n0 + scale_each(g_s, z1_s.transpose() * p.p11 * z1_s);

    const PolyMat left = z2_nu_s.transpose();
    auto seg = [&](const PolyMat& mid, Bound lo, Bound hi) {
      return poly_int(scale_each(g_nu, left * mid * z2_nu_th), Var::Nu, lo, hi);
    };
    n1 = n1 + scale_each(g_s, z1_s.transpose() * p.p12 * z2_s_th) +
         scale_each(g_th, z2_th_s.transpose() * p.p31 * z1_th) +
         seg(p.p33, Bound::at(a), Bound::theta()) +
         seg(p.p32, Bound::theta(), Bound::s()) +
         seg(p.p22, Bound::s(), Bound::at(b));
    n2 = n2 + scale_each(g_s, z1_s.transpose() * p.p13 * z2_s_th) +
         scale_each(g_th, z2_th_s.transpose() * p.p21 * z1_th) +
         seg(p.p33, Bound::at(a), Bound::s()) +
         seg(p.p23, Bound::s(), Bound::theta()) +
         seg(p.p22, Bound::theta(), Bound::at(b));
  }
  var.op = pi_parts(n0, n1, n2, a, b);
  return var;
}

void enforce_op_eq(SDPProblem& prob, const PIOperator& lhs,
                   const PIOperator& rhs) {
  if (lhs.rows != rhs.rows || lhs.cols != rhs.cols || lhs.a != rhs.a ||
      lhs.b != rhs.b) {
    throw std::invalid_argument("operator equality needs matching shapes");
  }
  prob.add_equalities(coeff_match(lhs.mult, rhs.mult));
  prob.add_equalities(coeff_match(lhs.lower, rhs.lower));
  prob.add_equalities(coeff_match(lhs.upper, rhs.upper));
}

}  // namespace pielab

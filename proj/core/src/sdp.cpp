#include "pielab/sdp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace pielab {
namespace {

constexpr double kZeroRowTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shape(const StandardSDP& sdp) {
  const int nb = int(sdp.block_sizes.size());
  for (int s : sdp.block_sizes)
    if (s < 0) throw std::invalid_argument("sdp: negative block size");
  for (const SDPRow& row : sdp.rows)
    for (const SDPTerm& t : row.terms) {
      if (t.block < 0 || t.block >= nb)
        throw std::invalid_argument("sdp: term block out of range");
      if (t.row < 0 || t.col < t.row || t.col >= sdp.block_sizes[t.block])
        throw std::invalid_argument("sdp: term index out of range");
    }
}

std::vector<Eigen::MatrixXd> scaled_identity_blocks(
    const std::vector<int>& sizes, double scale) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(sizes.size());
  for (int q : sizes)
    out.push_back(scale * Eigen::MatrixXd::Identity(q, q));
  return out;
}

std::vector<Eigen::MatrixXd> zero_blocks(const std::vector<int>& sizes) {
  return scaled_identity_blocks(sizes, 0.0);
}

double dot_blocks(const std::vector<Eigen::MatrixXd>& a,
                  const std::vector<Eigen::MatrixXd>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

double frob_blocks(const std::vector<Eigen::MatrixXd>& a) {
  return std::sqrt(dot_blocks(a, a));
}

double trace_blocks(const std::vector<Eigen::MatrixXd>& a) {
  double s = 0.0;
  for (const Eigen::MatrixXd& m : a) s += m.trace();
  return s;
}

bool finite_blocks(const std::vector<Eigen::MatrixXd>& a) {
  for (const Eigen::MatrixXd& m : a)
    if (!m.allFinite()) return false;
  return true;
}

// Largest step t with V + t*dV >= 0; V must be (numerically) PSD.
double block_step(const Eigen::MatrixXd& v, const Eigen::MatrixXd& dv) {
  const int q = int(v.rows());
  if (q == 0) return kInf;
  Eigen::MatrixXd a;
  Eigen::LLT<Eigen::MatrixXd> llt(v);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd l = llt.matrixL();
    Eigen::MatrixXd b =
        l.triangularView<Eigen::Lower>().solve(dv);
    a = l.triangularView<Eigen::Lower>().solve(b.transpose()).transpose();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
    const double top = std::max(es.eigenvalues().maxCoeff(), 1e-300);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(1e-14 * top).cwiseSqrt();
    Eigen::MatrixXd l = es.eigenvectors() * d.asDiagonal();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(l);
    Eigen::MatrixXd b = lu.solve(dv);
    a = lu.solve(b.transpose()).transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double max_step(const std::vector<Eigen::MatrixXd>& v,
                const std::vector<Eigen::MatrixXd>& dv) {
  double a = kInf;
  for (std::size_t i = 0; i < v.size(); ++i)
    a = std::min(a, block_step(v[i], dv[i]));
  return a;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

}  // namespace

int StandardSDP::svec_dim() const {
  int d = 0;
  for (int s : block_sizes) d += s * (s + 1) / 2;
  return d;
}

int StandardSDP::svec_index(int block, int row, int col) const {
  if (block < 0 || block >= int(block_sizes.size()))
    throw std::out_of_range("sdp: block out of range");
  if (row < 0 || col < row || col >= block_sizes[block])
    throw std::out_of_range("sdp: entry out of range");
  int off = 0;
  for (int b = 0; b < block; ++b)
    off += block_sizes[b] * (block_sizes[b] + 1) / 2;
  return off + col * (col + 1) / 2 + row;
}

Eigen::VectorXd StandardSDP::rhs_vector() const {
  Eigen::VectorXd b(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) b(j) = rows[j].rhs;
  return b;
}

bool sdp_equal(const StandardSDP& lhs, const StandardSDP& rhs) {
  if (lhs.block_sizes != rhs.block_sizes) return false;
  if (lhs.rows.size() != rhs.rows.size()) return false;
  for (std::size_t j = 0; j < lhs.rows.size(); ++j) {
    const SDPRow& a = lhs.rows[j];
    const SDPRow& b = rhs.rows[j];
    if (a.rhs != b.rhs || a.terms.size() != b.terms.size()) return false;
    for (std::size_t t = 0; t < a.terms.size(); ++t) {
      const SDPTerm& u = a.terms[t];
      const SDPTerm& v = b.terms[t];
      if (u.block != v.block || u.row != v.row || u.col != v.col ||
          u.value != v.value)
        return false;
    }
  }
  return true;
}

StandardSDP to_standard(const SDPProblem& prob) {
  StandardSDP sdp;
  sdp.block_sizes = prob.block_sizes();
  std::map<std::vector<double>, int> seen;
  for (const LinearEq& eq : prob.equalities()) {
    std::map<int, std::pair<SDPProblem::Slot, double>> combined;
    for (const auto& [var, w] : eq.terms) {
      const SDPProblem::Slot& slot = prob.slot_of(var);
      const int idx = sdp.svec_index(slot.block, slot.row, slot.col);
      auto it = combined.find(idx);
      if (it == combined.end())
        combined.emplace(idx, std::make_pair(slot, w));
      else
        it->second.second += w;
    }
    SDPRow row;
    row.rhs = eq.rhs;
    for (const auto& [idx, sw] : combined) {
      if (sw.second == 0.0) continue;
      const SDPProblem::Slot& slot = sw.first;
      const double value =
          slot.row == slot.col ? sw.second : 0.5 * sw.second;
      row.terms.push_back({slot.block, slot.row, slot.col, value});
    }
    if (row.terms.empty() && std::abs(row.rhs) <= kZeroRowTol) continue;

    // Canonical form: unit svec norm, leading coefficient positive.
    double norm2 = 0.0;
    for (const SDPTerm& t : row.terms)
      norm2 += (t.row == t.col ? 1.0 : 2.0) * t.value * t.value;
    const double ref =
        row.terms.empty() ? std::abs(row.rhs) : std::sqrt(norm2);
    const double lead =
        row.terms.empty() ? row.rhs : row.terms.front().value;
    const double scale = (lead < 0.0 ? -1.0 : 1.0) / ref;
    std::vector<double> key;
    key.reserve(1 + 2 * row.terms.size());
    key.push_back(scale * row.rhs);
    for (const SDPTerm& t : row.terms) {
      key.push_back(double(sdp.svec_index(t.block, t.row, t.col)));
      key.push_back(scale * t.value);
    }
    if (!seen.emplace(std::move(key), 1).second) continue;
    sdp.rows.push_back(std::move(row));
  }
  return sdp;
}

EmbeddedSolution solve_embedded(const StandardSDP& sdp,
                                const SolveOptions& options) {
  check_shape(sdp);
  EmbeddedSolution sol;
  const std::vector<int>& sizes = sdp.block_sizes;
  const int nb = int(sizes.size());
  long ntot = 0;
  for (int q : sizes) ntot += q;

  std::vector<const SDPRow*> act;
  bool empty_conflict = false;
  for (const SDPRow& row : sdp.rows) {
    if (!row.terms.empty())
      act.push_back(&row);
    else if (std::abs(row.rhs) > kZeroRowTol)
      empty_conflict = true;
  }
  const int m = int(act.size());
  sol.x_blocks = zero_blocks(sizes);
  sol.y = Eigen::VectorXd::Zero(m);
  if (empty_conflict) {
    sol.status = SDPSolution::Status::kInfeasible;
    sol.detail =
        "equality with empty left-hand side and nonzero right-hand side";
    return sol;
  }
  if (m == 0 || ntot == 0) {
    sol.status = SDPSolution::Status::kFeasible;
    sol.detail = "no active equality constraints";
    return sol;
  }

  Eigen::VectorXd b(m);
  for (int j = 0; j < m; ++j) b(j) = act[j]->rhs;
  const double bnorm = b.norm();
  const double binf = b.lpNorm<Eigen::Infinity>();
  const double cnorm = std::sqrt(double(ntot));

  // (A(M))_j = tr(A_j M); valid for non-symmetric M as well.
  auto apply_a = [&](const std::vector<Eigen::MatrixXd>& mat,
                     Eigen::VectorXd& out) {
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (const SDPTerm& t : act[j]->terms) {
        const Eigen::MatrixXd& mb = mat[t.block];
        s += t.value * (t.row == t.col
                            ? mb(t.row, t.row)
                            : mb(t.row, t.col) + mb(t.col, t.row));
      }
      out(j) = s;
    }
  };
  // out += sign * sum_j v_j A_j.
  auto add_at = [&](const Eigen::VectorXd& v,
                    std::vector<Eigen::MatrixXd>& out, double sign) {
    for (int j = 0; j < m; ++j) {
      const double w = sign * v(j);
      if (w == 0.0) continue;
      for (const SDPTerm& t : act[j]->terms) {
        out[t.block](t.row, t.col) += w * t.value;
        if (t.row != t.col) out[t.block](t.col, t.row) += w * t.value;
      }
    }
  };

  double start = 10.0;
  for (int j = 0; j < m; ++j) {
    start = std::max(start, std::abs(b(j)));
    double f = 0.0;
    for (const SDPTerm& t : act[j]->terms)
      f += (t.row == t.col ? 1.0 : 2.0) * t.value * t.value;
    start = std::max(start, std::sqrt(f));
  }

  std::vector<Eigen::MatrixXd> x = scaled_identity_blocks(sizes, start);
  std::vector<Eigen::MatrixXd> z = scaled_identity_blocks(sizes, start);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  Eigen::VectorXd ax(m), rp(m);
  std::vector<Eigen::MatrixXd> rd = zero_blocks(sizes);
  double rel_p = kInf, rel_d = kInf, rel_g = kInf, mu = kInf;

  auto evaluate = [&]() {
    apply_a(x, ax);
    rp = b - ax;
    for (int bi = 0; bi < nb; ++bi) {
      rd[bi] = -z[bi];
      rd[bi].diagonal().array() += 1.0;
    }
    add_at(y, rd, -1.0);
    rel_p = rp.norm() / (1.0 + bnorm);
    rel_d = frob_blocks(rd) / (1.0 + cnorm);
    const double cx = trace_blocks(x);
    const double by = b.dot(y);
    rel_g = std::abs(cx - by) / (1.0 + std::abs(cx) + std::abs(by));
    mu = dot_blocks(x, z) / double(ntot);
    sol.objective = cx;
    sol.primal_residual = rel_p;
    sol.dual_residual = rel_d;
    sol.gap = rel_g;
  };

  const bool trace = std::getenv("PIELAB_SDP_TRACE") != nullptr;
  double t_zinv = 0.0, t_schur = 0.0, t_fact = 0.0, t_step = 0.0;
  auto tick = [] {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  };
  auto finish = [&](SDPSolution::Status status, const std::string& detail) {
    if (trace)
      std::fprintf(stderr,
                   "[sdp] time zinv=%.2fs schur=%.2fs factor=%.2fs "
                   "steplen=%.2fs\n",
                   t_zinv, t_schur, t_fact, t_step);
    sol.status = status;
    sol.detail = detail;
    sol.x_blocks = x;
    sol.y = y;
    return sol;
  };
  // Exit without a converged solve.  A primal iterate meeting the witness
  // tolerance is a feasibility certificate on its own (the blocks stay
  // positive definite by construction); trace optimality is not required.
  // Callers recheck the equalities in unscaled absolute terms.  A diverging
  // iterate is excluded: residual -> 0 along trace -> inf is how weak
  // infeasibility presents, not a usable certificate.
  constexpr double kWitnessTol = 1e-5;
  constexpr double kWitnessTraceCap = 1e6;
  auto finish_partial = [&](const std::string& why) {
    evaluate();
    double tr = 0.0;
    for (const Eigen::MatrixXd& blk : x) tr += blk.trace();
    if (rel_p < kWitnessTol && tr <= kWitnessTraceCap * (1.0 + binf))
      return finish(SDPSolution::Status::kFeasible,
                    why + "; equalities hold at the final iterate");
    return finish(SDPSolution::Status::kInconclusive, why);
  };

  std::vector<double> mu_hist, rp_hist;
  int tiny_steps = 0;
  double farkas_mineig = -kInf;

  std::vector<Eigen::MatrixXd> zinv(nb), rc(nb), g(nb), xz(nb);
  std::vector<Eigen::MatrixXd> dxa(nb), dza(nb), dx(nb), dz(nb);
  Eigen::MatrixXd schur(m, m);
  Eigen::VectorXd rhs1(m), rhs2(m), tmp(m), dya(m), dy(m);

  // Row terms regrouped by touched block with matrix rows remapped to local
  // indices, so W_j = Z^-1 A_j X is one (q x p)(p x q) product per block and
  // the pair scan only visits rows sharing a block.
  struct LocalTerm {
    int row, col, ri, ci;
    double value;
  };
  struct RowBlock {
    int block = 0;
    int pos = 0;  // index of this row inside block_rows[block]
    std::vector<int> rows;
    std::vector<LocalTerm> terms;
  };
  std::vector<std::vector<RowBlock>> grouped(static_cast<std::size_t>(m));
  std::vector<std::vector<int>> block_rows(static_cast<std::size_t>(nb));
  int maxp = 0, maxq = 0;
  for (int q : sizes) maxq = std::max(maxq, q);
  for (int j = 0; j < m; ++j) {
    auto slot = [&](int block) -> RowBlock& {
      for (RowBlock& rb : grouped[std::size_t(j)])
        if (rb.block == block) return rb;
      grouped[std::size_t(j)].push_back(RowBlock{block, 0, {}, {}});
      return grouped[std::size_t(j)].back();
    };
    for (const SDPTerm& t : act[std::size_t(j)]->terms) {
      RowBlock& rb = slot(t.block);
      rb.rows.push_back(t.row);
      if (t.col != t.row) rb.rows.push_back(t.col);
    }
    for (RowBlock& rb : grouped[std::size_t(j)]) {
      std::sort(rb.rows.begin(), rb.rows.end());
      rb.rows.erase(std::unique(rb.rows.begin(), rb.rows.end()),
                    rb.rows.end());
      maxp = std::max(maxp, int(rb.rows.size()));
    }
    for (const SDPTerm& t : act[std::size_t(j)]->terms) {
      RowBlock& rb = slot(t.block);
      const auto local = [&](int r) {
        return int(std::lower_bound(rb.rows.begin(), rb.rows.end(), r) -
                   rb.rows.begin());
      };
      rb.terms.push_back({t.row, t.col, local(t.row), local(t.col), t.value});
    }
    for (RowBlock& rb : grouped[std::size_t(j)]) {
      rb.pos = int(block_rows[std::size_t(rb.block)].size());
      block_rows[std::size_t(rb.block)].push_back(j);
    }
  }
  Eigen::MatrixXd mbuf(maxp, maxq), zrbuf(maxq, maxp), wbuf(maxq, maxq);

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    sol.iterations = iter - 1;
    evaluate();
    if (trace)
      std::fprintf(stderr,
                   "[sdp] it=%3d mu=%.3e rp=%.3e rd=%.3e rg=%.3e |y|=%.3e\n",
                   iter, mu, rel_p, rel_d, rel_g, y.norm());
    if (rel_p < options.tol && rel_d < options.tol && rel_g < options.tol)
      return finish(SDPSolution::Status::kFeasible, "optimal");

    const double ynorm = y.norm();
    bool ray_improving = false;
    if (ynorm >= 10.0) {
      Eigen::VectorXd yh = y / ynorm;
      std::vector<Eigen::MatrixXd> ray = zero_blocks(sizes);
      add_at(yh, ray, -1.0);
      double mineig = kInf;
      for (int bi = 0; bi < nb; ++bi) {
        if (sizes[bi] == 0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            ray[bi], Eigen::EigenvaluesOnly);
        mineig = std::min(mineig, es.eigenvalues()(0));
      }
      const double bty = b.dot(yh);
      if (trace)
        std::fprintf(stderr, "[sdp]   farkas bty=%.3e mineig=%.3e\n", bty,
                     mineig);
      if (bty >= 1e-6 * (1.0 + binf) && mineig >= -1e-9 * bty)
        return finish(SDPSolution::Status::kInfeasible,
                      "dual improving ray");
      // A normalized ray with healthy objective whose negative part is still
      // shrinking is converging toward an infeasibility certificate; the
      // stall heuristics must not cut that race short.
      ray_improving = bty >= 1e-6 * (1.0 + binf) && mineig >= -1e-2 * bty &&
                      mineig > 0.8 * farkas_mineig;
      farkas_mineig = mineig;
    }

    mu_hist.push_back(mu);
    rp_hist.push_back(rel_p);
    const std::size_t h = mu_hist.size();
    if (h >= 20 && mu > 0.9 * mu_hist[h - 11] &&
        rel_p > 0.9 * rp_hist[h - 11] && !ray_improving)
      return finish_partial("progress stalled");

    const double tz0 = tick();
    for (int bi = 0; bi < nb; ++bi) {
      const int q = sizes[bi];
      Eigen::LLT<Eigen::MatrixXd> llt(z[bi]);
      if (llt.info() == Eigen::Success) {
        zinv[bi] = llt.solve(Eigen::MatrixXd::Identity(q, q));
      } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z[bi]);
        const double top = std::max(es.eigenvalues().maxCoeff(), 1e-300);
        Eigen::VectorXd d = es.eigenvalues().cwiseMax(1e-14 * top);
        zinv[bi] = es.eigenvectors() * d.cwiseInverse().asDiagonal() *
                   es.eigenvectors().transpose();
      }
    }
    t_zinv += tick() - tz0;

    const double ts0 = tick();
    // Schur matrix: schur(j,k) = tr(A_j X A_k Z^-1) = tr(A_k W_j) with
    // W_j = Z^-1 A_j X accumulated block by block over rows sharing it.
    schur.setZero();
    for (int j = 0; j < m; ++j) {
      for (const RowBlock& rb : grouped[std::size_t(j)]) {
        const int bi = rb.block;
        const int q = sizes[std::size_t(bi)];
        const int p = int(rb.rows.size());
        if (q == 0 || p == 0) continue;
        auto mrows = mbuf.topLeftCorner(p, q);
        mrows.setZero();
        for (const LocalTerm& t : rb.terms) {
          mrows.row(t.ri) += t.value * x[std::size_t(bi)].row(t.col);
          if (t.row != t.col)
            mrows.row(t.ci) += t.value * x[std::size_t(bi)].row(t.row);
        }
        auto zr = zrbuf.topLeftCorner(q, p);
        for (int i = 0; i < p; ++i)
          zr.col(i) = zinv[std::size_t(bi)].col(rb.rows[std::size_t(i)]);
        auto w = wbuf.topLeftCorner(q, q);
        w.noalias() = zr * mrows;
        const std::vector<int>& brows = block_rows[std::size_t(bi)];
        for (std::size_t ki = std::size_t(rb.pos); ki < brows.size(); ++ki) {
          const int k = brows[ki];
          const RowBlock* krb = nullptr;
          for (const RowBlock& cand : grouped[std::size_t(k)])
            if (cand.block == bi) {
              krb = &cand;
              break;
            }
          double s = 0.0;
          for (const LocalTerm& t : krb->terms)
            s += t.value * (t.row == t.col
                                ? w(t.row, t.row)
                                : w(t.row, t.col) + w(t.col, t.row));
          schur(j, k) += s;
        }
      }
    }
    for (int j = 0; j < m; ++j)
      for (int k = j + 1; k < m; ++k) schur(k, j) = schur(j, k);
    t_schur += tick() - ts0;

    // Predictor.
    for (int bi = 0; bi < nb; ++bi) {
      xz[bi].noalias() = x[bi] * z[bi];
      rc[bi] = -xz[bi];
      g[bi].noalias() = (rc[bi] - x[bi] * rd[bi]) * zinv[bi];
    }
    apply_a(g, tmp);
    rhs1 = rp - tmp;

    const double tf0 = tick();
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    double diag_ref = schur.diagonal().cwiseAbs().maxCoeff();
    if (!(diag_ref > 0.0)) diag_ref = 1.0;
    bool factored = false;
    double best_res = kInf;
    double best_reg = 0.0;
    Eigen::VectorXd best_dy = Eigen::VectorXd::Zero(m);
    for (double reg : {0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6}) {
      Eigen::MatrixXd regged = schur;
      regged.diagonal().array() += reg * diag_ref;
      ldlt.compute(regged);
      if (ldlt.info() != Eigen::Success) continue;
      Eigen::VectorXd trial = ldlt.solve(rhs1);
      if (!trial.allFinite()) continue;
      const double res =
          (schur * trial - rhs1).norm() / (1.0 + rhs1.norm());
      if (res < best_res) {
        best_res = res;
        best_dy = trial;
        best_reg = reg;
      }
      if (res < 1e-7) {
        factored = true;
        break;
      }
    }
    // An inconsistent Schur system still yields a useful direction: its
    // unresolved component drives y along a dual improving ray.
    if (!factored) {
      if (!(best_res < kInf))
        return finish_partial("normal equations could not be solved");
      Eigen::MatrixXd regged = schur;
      regged.diagonal().array() += best_reg * diag_ref;
      ldlt.compute(regged);
    }
    dya = best_dy;
    t_fact += tick() - tf0;

    for (int bi = 0; bi < nb; ++bi) dza[bi] = rd[bi];
    add_at(dya, dza, -1.0);
    for (int bi = 0; bi < nb; ++bi) {
      dxa[bi].noalias() = (rc[bi] - x[bi] * dza[bi]) * zinv[bi];
      dxa[bi] = 0.5 * (dxa[bi] + dxa[bi].transpose()).eval();
    }
    const double tp0 = tick();
    const double apa = std::min(1.0, 0.98 * max_step(x, dxa));
    const double ada = std::min(1.0, 0.98 * max_step(z, dza));
    t_step += tick() - tp0;
    const double mu_aff =
        (dot_blocks(x, z) + apa * dot_blocks(dxa, z) +
         ada * dot_blocks(x, dza) + apa * ada * dot_blocks(dxa, dza)) /
        double(ntot);
    double sigma = mu_aff / mu;
    sigma = std::clamp(sigma * sigma * sigma, 0.0, 1.0);

    // Corrector.
    for (int bi = 0; bi < nb; ++bi) {
      rc[bi] = -xz[bi];
      rc[bi].diagonal().array() += sigma * mu;
      rc[bi].noalias() -= dxa[bi] * dza[bi];
      g[bi].noalias() = (rc[bi] - x[bi] * rd[bi]) * zinv[bi];
    }
    apply_a(g, tmp);
    rhs2 = rp - tmp;
    dy = ldlt.solve(rhs2);

    for (int bi = 0; bi < nb; ++bi) dz[bi] = rd[bi];
    add_at(dy, dz, -1.0);
    for (int bi = 0; bi < nb; ++bi) {
      dx[bi].noalias() = (rc[bi] - x[bi] * dz[bi]) * zinv[bi];
      dx[bi] = 0.5 * (dx[bi] + dx[bi].transpose()).eval();
    }
    const double tq0 = tick();
    const double ap = std::min(1.0, 0.98 * max_step(x, dx));
    const double ad = std::min(1.0, 0.98 * max_step(z, dz));
    t_step += tick() - tq0;

    for (int bi = 0; bi < nb; ++bi) {
      x[bi] += ap * dx[bi];
      x[bi] = 0.5 * (x[bi] + x[bi].transpose()).eval();
      z[bi] += ad * dz[bi];
      z[bi] = 0.5 * (z[bi] + z[bi].transpose()).eval();
    }
    y += ad * dy;

    if (!finite_blocks(x) || !finite_blocks(z) || !y.allFinite())
      return finish(SDPSolution::Status::kInconclusive,
                    "numerical breakdown");
    if (frob_blocks(x) > 1e16 * (1.0 + start))
      return finish_partial("iterates diverged");
    tiny_steps = (ap < 1e-7 && ad < 1e-7) ? tiny_steps + 1 : 0;
    if (tiny_steps >= 3) return finish_partial("step length collapsed");
    sol.iterations = iter;
  }
  return finish_partial("iteration limit reached");
}

SDPSolution solve(const SDPProblem& prob) {
  StandardSDP sdp = to_standard(prob);
  // Scaling every right-hand side by k maps the feasible set X -> k X (the
  // cone is scale invariant), so a solution of the scaled problem rescales
  // back.  Normalizing the offsets to unit size keeps the central path away
  // from the tiny-magnitude regime when the inhomogeneity is small.
  double rmax = 0.0;
  for (const SDPRow& row : sdp.rows) rmax = std::max(rmax, std::abs(row.rhs));
  double scale = 1.0;
  if (rmax > 0.0) scale = std::clamp(1.0 / rmax, 1e-12, 1e12);
  if (scale != 1.0)
    for (SDPRow& row : sdp.rows) row.rhs *= scale;
  EmbeddedSolution es = solve_embedded(sdp);
  SDPSolution out;
  out.status = es.status;
  out.iterations = es.iterations;
  out.detail = std::move(es.detail);
  out.gram = std::move(es.x_blocks);
  out.primal_residual = es.primal_residual;
  if (scale != 1.0)
    for (Eigen::MatrixXd& blk : out.gram) blk /= scale;
  if (out.status == SDPSolution::Status::kFeasible) {
    const std::map<int, double> vals = prob.assignment(out.gram);
    double worst = 0.0;
    for (const LinearEq& eq : prob.equalities()) {
      double r = -eq.rhs;
      for (const auto& [var, w] : eq.terms) r += w * vals.at(var);
      worst = std::max(worst, std::abs(r));
    }
    out.primal_residual = worst;
    if (worst > kEqualityRecheckTol) {
      out.status = SDPSolution::Status::kInconclusive;
      out.detail = "equality recheck exceeded tolerance";
    }
  }
  return out;
}

void export_sdpa(const StandardSDP& sdp, const std::string& path) {
  check_shape(sdp);
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("sdpa export: cannot open " + path);
  out << "\"min trace(X), <A_j,X> = b_j, X >= 0; encoded with c = b, "
         "F_j = A_j, F0 = -I\n";
  out << sdp.rows.size() << "\n";
  out << sdp.block_sizes.size() << "\n";
  for (std::size_t bi = 0; bi < sdp.block_sizes.size(); ++bi)
    out << (bi ? " " : "") << sdp.block_sizes[bi];
  out << "\n";
  for (std::size_t j = 0; j < sdp.rows.size(); ++j)
    out << (j ? " " : "") << format_double(sdp.rows[j].rhs);
  out << "\n";
  for (std::size_t bi = 0; bi < sdp.block_sizes.size(); ++bi)
    for (int i = 0; i < sdp.block_sizes[bi]; ++i)
      out << "0 " << bi + 1 << " " << i + 1 << " " << i + 1 << " -1\n";
  for (std::size_t j = 0; j < sdp.rows.size(); ++j)
    for (const SDPTerm& t : sdp.rows[j].terms)
      out << j + 1 << " " << t.block + 1 << " " << t.row + 1 << " "
          << t.col + 1 << " " << format_double(t.value) << "\n";
  if (!out)
    throw std::runtime_error("sdpa export: write failed for " + path);
}

StandardSDP read_sdpa(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("sdpa import: cannot open " + path);
  std::string text, line;
  while (std::getline(in, line)) {
    if (!line.empty() && (line[0] == '"' || line[0] == '*')) continue;
    for (char& c : line)
      if (c == ',' || c == '(' || c == ')' || c == '{' || c == '}') c = ' ';
    text += line;
    text += ' ';
  }
  std::istringstream iss(text);
  long m = 0, nb = 0;
  if (!(iss >> m >> nb) || m < 0 || nb < 0)
    throw std::runtime_error("sdpa import: bad header");
  StandardSDP sdp;
  sdp.block_sizes.resize(std::size_t(nb));
  for (int& q : sdp.block_sizes) {
    if (!(iss >> q))
      throw std::runtime_error("sdpa import: missing block size");
    if (q < 0)
      throw std::runtime_error("sdpa import: diagonal blocks unsupported");
  }
  sdp.rows.resize(std::size_t(m));
  for (SDPRow& row : sdp.rows)
    if (!(iss >> row.rhs))
      throw std::runtime_error("sdpa import: missing objective entry");
  long k, blk, i, j;
  double v;
  while (iss >> k >> blk >> i >> j >> v) {
    if (k < 0 || k > m || blk < 1 || blk > nb)
      throw std::runtime_error("sdpa import: entry index out of range");
    const long q = sdp.block_sizes[std::size_t(blk - 1)];
    if (i < 1 || j < 1 || i > q || j > q)
      throw std::runtime_error("sdpa import: entry index out of range");
    if (k == 0) {
      if (i != j || v != -1.0)
        throw std::runtime_error(
            "sdpa import: objective block must be minus identity");
      continue;
    }
    const int r = int(std::min(i, j)) - 1;
    const int c = int(std::max(i, j)) - 1;
    sdp.rows[std::size_t(k - 1)].terms.push_back(
        {int(blk - 1), r, c, v});
  }
  iss.clear();
  std::string rest;
  if (iss >> rest)
    throw std::runtime_error("sdpa import: malformed entry near " + rest);
  check_shape(sdp);
  return sdp;
}

}  // namespace pielab

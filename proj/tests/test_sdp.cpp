#include "pielab/sdp.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pielab/cone.hpp"

using namespace pielab;

namespace {

using Status = SDPSolution::Status;

// 2x2 block with trace pinned to one and the off-diagonal entry pinned.
SDPProblem trace_one_offdiag(double offdiag) {
  SDPProblem prob;
  const int blk = prob.add_psd_block(2);
  const int x00 = prob.entry_var(blk, 0, 0);
  const int x01 = prob.entry_var(blk, 0, 1);
  const int x11 = prob.entry_var(blk, 1, 1);
  prob.add_equalities({{{{x00, 1.0}, {x11, 1.0}}, 1.0},
                       {{{x01, 1.0}}, offdiag}});
  return prob;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("standard form orders svec slots and halves off-diagonal weights") {
  SDPProblem prob = trace_one_offdiag(0.6);
  const StandardSDP sdp = to_standard(prob);
  CHECK(sdp.block_sizes == std::vector<int>{2});
  CHECK(sdp.svec_dim() == 3);
  CHECK(sdp.svec_index(0, 0, 0) == 0);
  CHECK(sdp.svec_index(0, 0, 1) == 1);
  CHECK(sdp.svec_index(0, 1, 1) == 2);
  REQUIRE(sdp.rows.size() == 2);
  REQUIRE(sdp.rows[0].terms.size() == 2);
  CHECK(sdp.rows[0].terms[0].row == 0);
  CHECK(sdp.rows[0].terms[0].col == 0);
  CHECK(sdp.rows[0].terms[0].value == 1.0);
  CHECK(sdp.rows[0].terms[1].row == 1);
  CHECK(sdp.rows[0].terms[1].col == 1);
  CHECK(sdp.rows[0].terms[1].value == 1.0);
  CHECK(sdp.rows[0].rhs == 1.0);
  REQUIRE(sdp.rows[1].terms.size() == 1);
  CHECK(sdp.rows[1].terms[0].row == 0);
  CHECK(sdp.rows[1].terms[0].col == 1);
  CHECK(sdp.rows[1].terms[0].value == 0.5);
  CHECK(sdp.rows[1].rhs == 0.6);
}

TEST_CASE("standard form drops duplicate and rescaled equalities") {
  SDPProblem prob;
  const int blk = prob.add_psd_block(1);
  const int x = prob.entry_var(blk, 0, 0);
  prob.add_equalities({{{{x, 1.0}}, 1.0},
                       {{{x, 1.0}}, 1.0},
                       {{{x, 2.0}}, 2.0},
                       {{{x, -3.0}}, -3.0},
                       {{{x, 1.0}}, 2.0},
                       {{}, 0.0},
                       {{{x, 1.0}, {x, -1.0}}, 0.0}});
  const StandardSDP sdp = to_standard(prob);
  REQUIRE(sdp.rows.size() == 2);
  CHECK(sdp.rows[0].rhs == 1.0);
  CHECK(sdp.rows[1].rhs == 2.0);
  CHECK(sdp.rows[0].terms.size() == 1);
}

TEST_CASE("inconsistent equality with no matrix terms is kept and refuted") {
  SDPProblem prob;
  prob.add_psd_block(1);
  prob.add_equalities({{{}, 1.0}});
  const StandardSDP sdp = to_standard(prob);
  REQUIRE(sdp.rows.size() == 1);
  CHECK(sdp.rows[0].terms.empty());
  const SDPSolution sol = solve(prob);
  CHECK(sol.status == Status::kInfeasible);
}

TEST_CASE("pinned scalar is certified with its value recovered") {
  SDPProblem prob;
  const int blk = prob.add_psd_block(1);
  const int x = prob.entry_var(blk, 0, 0);
  prob.add_equalities({{{{x, 1.0}}, 1.0}});
  const SDPSolution sol = solve(prob);
  REQUIRE(sol.status == Status::kFeasible);
  CHECK(sol.gram[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.primal_residual <= kEqualityRecheckTol);
  CHECK(sol.iterations > 0);
}

TEST_CASE("negative pinned scalar yields a dual improving ray") {
  SDPProblem prob;
  const int blk = prob.add_psd_block(1);
  const int x = prob.entry_var(blk, 0, 0);
  prob.add_equalities({{{{x, 1.0}}, -1.0}});
  CHECK(solve(prob).status == Status::kInfeasible);
}

TEST_CASE("trace-one completion separates feasible from infeasible pins") {
  CHECK(solve(trace_one_offdiag(0.6)).status == Status::kInfeasible);
  const SDPSolution sol = solve(trace_one_offdiag(0.3));
  REQUIRE(sol.status == Status::kFeasible);
  CHECK(sol.gram[0](0, 1) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(sol.gram[0](0, 0) + sol.gram[0](1, 1) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("feasible set touching the cone boundary is still certified") {
  SDPProblem prob;
  const int blk = prob.add_psd_block(2);
  const int x00 = prob.entry_var(blk, 0, 0);
  const int x11 = prob.entry_var(blk, 1, 1);
  prob.add_equalities({{{{x00, 1.0}}, 0.0}, {{{x11, 1.0}}, 1.0}});
  const SDPSolution sol = solve(prob);
  REQUIRE(sol.status == Status::kFeasible);
  CHECK(std::abs(sol.gram[0](0, 0)) <= 1e-5);
  CHECK(std::abs(sol.gram[0](0, 1)) <= 1e-4);
  CHECK(sol.gram[0](1, 1) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("zero trace forces the zero matrix") {
  SDPProblem prob;
  const int blk = prob.add_psd_block(2);
  const int x00 = prob.entry_var(blk, 0, 0);
  const int x11 = prob.entry_var(blk, 1, 1);
  prob.add_equalities({{{{x00, 1.0}, {x11, 1.0}}, 0.0}});
  const SDPSolution sol = solve(prob);
  REQUIRE(sol.status == Status::kFeasible);
  CHECK(sol.gram[0].cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("off-diagonal pinned over a vanishing diagonal stays inconclusive") {
  // Infeasible, but no dual improving ray exists; the solver must not claim
  // either verdict.
  SDPProblem prob;
  const int blk = prob.add_psd_block(2);
  const int x00 = prob.entry_var(blk, 0, 0);
  const int x01 = prob.entry_var(blk, 0, 1);
  prob.add_equalities({{{{x00, 1.0}}, 0.0}, {{{x01, 1.0}}, 0.25}});
  CHECK(solve(prob).status == Status::kInconclusive);
}

TEST_CASE("dependent consistent equalities are solved") {
  SDPProblem prob;
  const int blk = prob.add_psd_block(2);
  const int x00 = prob.entry_var(blk, 0, 0);
  const int x11 = prob.entry_var(blk, 1, 1);
  prob.add_equalities({{{{x00, 1.0}}, 1.0},
                       {{{x11, 1.0}}, 1.0},
                       {{{x00, 1.0}, {x11, 1.0}}, 2.0}});
  const SDPSolution sol = solve(prob);
  REQUIRE(sol.status == Status::kFeasible);
  CHECK(sol.gram[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.gram[0](1, 1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("contradictory pins on one entry yield a dual improving ray") {
  SDPProblem prob;
  const int blk = prob.add_psd_block(1);
  const int x = prob.entry_var(blk, 0, 0);
  prob.add_equalities({{{{x, 1.0}}, 1.0}, {{{x, 1.0}}, 2.0}});
  CHECK(solve(prob).status == Status::kInfeasible);
}

TEST_CASE("empty problem is trivially feasible") {
  SDPProblem prob;
  const SDPSolution sol = solve(prob);
  CHECK(sol.status == Status::kFeasible);
  CHECK(sol.gram.empty());
}

TEST_CASE("equalities couple entries across blocks") {
  SDPProblem prob;
  const int a = prob.add_psd_block(1);
  const int b = prob.add_psd_block(2);
  const int a00 = prob.entry_var(a, 0, 0);
  const int b00 = prob.entry_var(b, 0, 0);
  const int b11 = prob.entry_var(b, 1, 1);
  prob.add_equalities({{{{a00, 1.0}}, 2.0},
                       {{{b00, 1.0}, {b11, 1.0}}, 1.0},
                       {{{a00, 1.0}, {b00, 1.0}}, 2.5}});
  const SDPSolution sol = solve(prob);
  REQUIRE(sol.status == Status::kFeasible);
  CHECK(sol.gram[0](0, 0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol.gram[1](0, 0) == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("embedded solve minimizes the trace") {
  SDPProblem prob;
  const int blk = prob.add_psd_block(2);
  const int x00 = prob.entry_var(blk, 0, 0);
  prob.add_equalities({{{{x00, 1.0}}, 1.0}});
  const EmbeddedSolution es = solve_embedded(to_standard(prob));
  REQUIRE(es.status == Status::kFeasible);
  CHECK(es.objective == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("repeated solves are deterministic") {
  const EmbeddedSolution a = solve_embedded(to_standard(trace_one_offdiag(0.3)));
  const EmbeddedSolution b = solve_embedded(to_standard(trace_one_offdiag(0.3)));
  CHECK(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  CHECK(std::abs(a.objective - b.objective) <= 1e-10);
  CHECK((a.y - b.y).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK(std::abs(a.primal_residual - b.primal_residual) <= 1e-12);
}

TEST_CASE("positive operator variable matches a constant multiplier") {
  SDPProblem prob;
  const PosPIVar p = declare_pos_pivar(prob, 1, 0, 0.0, 1.0);
  enforce_op_eq(prob, p.op, pi_scale(pi_identity(1, 0.0, 1.0), 2.0));
  const SDPSolution sol = solve(prob);
  REQUIRE(sol.status == Status::kFeasible);
  const PIOperator fitted =
      pi_substitute(p.op, prob.assignment(sol.gram));
  CHECK(pi_max_coeff_diff(fitted, pi_scale(pi_identity(1, 0.0, 1.0), 2.0)) <=
        1e-5);
}

TEST_CASE("positive operator variable refuses a negative multiplier") {
  SDPProblem prob;
  const PosPIVar p = declare_pos_pivar(prob, 1, 0, 0.0, 1.0);
  enforce_op_eq(prob, p.op, pi_scale(pi_identity(1, 0.0, 1.0), -1.0));
  CHECK(solve(prob).status == Status::kInfeasible);
}

TEST_CASE("sdpa export and import round-trip exactly") {
  std::vector<StandardSDP> cases;
  cases.push_back(to_standard(trace_one_offdiag(0.1 + 0.2)));
  {
    SDPProblem prob;
    const int a = prob.add_psd_block(1);
    const int b = prob.add_psd_block(3);
    const int a00 = prob.entry_var(a, 0, 0);
    const int b02 = prob.entry_var(b, 0, 2);
    const int b11 = prob.entry_var(b, 1, 1);
    prob.add_equalities({{{{a00, 1.0 / 3.0}, {b02, -2.0 / 7.0}}, 0.123456789012345},
                         {{{b11, 1e-13}}, -5.5},
                         {{}, 1.0}});
    cases.push_back(to_standard(prob));
  }
  int n = 0;
  for (const StandardSDP& sdp : cases) {
    const std::string p1 =
        temp_path(("pielab_roundtrip_" + std::to_string(n) + ".dat-s").c_str());
    const std::string p2 =
        temp_path(("pielab_roundtrip_" + std::to_string(n) + "b.dat-s").c_str());
    ++n;
    export_sdpa(sdp, p1);
    const StandardSDP back = read_sdpa(p1);
    CHECK(sdp_equal(sdp, back));
    export_sdpa(back, p2);
    CHECK(slurp(p1) == slurp(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
  }
}

TEST_CASE("sdpa import validates structure") {
  CHECK_THROWS_AS(read_sdpa(temp_path("pielab_missing.dat-s")),
                  std::runtime_error);
  const std::string bad = temp_path("pielab_bad.dat-s");
  {
    std::ofstream out(bad);
    out << "1\n1\n2\n1.0\n1 1 3 3 1.0\n";
  }
  CHECK_THROWS_AS(read_sdpa(bad), std::runtime_error);
  {
    std::ofstream out(bad);
    out << "not a header\n";
  }
  CHECK_THROWS_AS(read_sdpa(bad), std::runtime_error);
  std::filesystem::remove(bad);
}

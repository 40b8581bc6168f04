#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "ssp/metrics.hpp"
#include "ssp/reference.hpp"
#include "ssp/serialize.hpp"
#include "ssp/solver.hpp"
#include "support.hpp"

using namespace ssp;
using namespace ssp_test;

namespace {

// min 0.5||x - (2,0)||^2 s.t. x1 <= 1, expressed as two scaled residuals so
// that F(x) matches the target exactly: x* = (1,0), F* = 0.5.
ProblemInstance halfspace_projection_problem() {
  const double s = std::sqrt(2.0);
  Vector a1(2), a2(2), c(2);
  a1 << s, 0;
  a2 << 0, s;
  c << 1, 0;
  std::vector<FComponent> f = {QuadResidualF{a1, 2.0 * s}, QuadResidualF{a2, 0.0}};
  std::vector<L1Component> g(2);
  std::vector<HComponent> h = {AffineH{c, -1.0}};
  return ProblemInstance(std::move(f), std::move(g), std::move(h), SimpleSet::whole_space(2));
}

}  // namespace

TEST_CASE("feasibility norm") {
  // Three constraints with violations (0.3, -0.4, 0.4) -> sqrt(0.09 + 0.16).
  Vector c(1);
  c << 1.0;
  ProblemInstance p({LinearF{Vector::Zero(1)}}, {L1Component{}},
                    {AffineH{c, 0.3}, AffineH{c, -0.4}, AffineH{c, 0.4}},
                    SimpleSet::whole_space(1));
  const Vector zero = Vector::Zero(1);
  CHECK(feasibility_norm(p, zero) == doctest::Approx(0.5));

  Vector feas(1);
  feas << -0.5;
  CHECK(feasibility_norm(p, feas) == 0.0);

  SUBCASE("matches componentwise recomputation on random points") {
    ConstrainedLassoSpec spec;
    spec.N = 5;
    spec.n = 4;
    spec.m_lin = 7;
    spec.m_soc = 3;
    spec.seed = 18;
    const ProblemInstance q = make_constrained_lasso(spec);
    Rng rng(12, 0);
    for (int t = 0; t < 30; ++t) {
      const Vector x = random_vector(rng, 4, 2.0);
      double acc = 0.0;
      for (int j = 0; j < q.num_constraints(); ++j) {
        acc += std::pow(std::max(0.0, q.h_value(j, x)), 2);
      }
      CHECK(feasibility_norm(q, x) == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
    }
  }
}

TEST_CASE("distance to the feasible set") {
  SUBCASE("halfspace: exact") {
    Vector c(2);
    c << 1, 0;
    ProblemInstance p({LinearF{Vector::Zero(2)}}, {L1Component{}}, {AffineH{c, -1.0}},
                      SimpleSet::whole_space(2));
    Vector x(2);
    x << 2.0, 0.0;
    const auto est = distance_to_feasible(p, x, 1e-10);
    CHECK(est.converged);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
    Vector inside(2);
    inside << 0.5, -3.0;
    CHECK(distance_to_feasible(p, inside, 1e-10).value == 0.0);
  }
  SUBCASE("upper bound on boxes expressed as affine constraints") {
    // Feasible set {x <= (1,1)} as two constraints; start at (2,2):
    // exact distance sqrt(2), path length is an upper bound.
    Vector e1(2), e2(2);
    e1 << 1, 0;
    e2 << 0, 1;
    ProblemInstance p({LinearF{Vector::Zero(2)}}, {L1Component{}},
                      {AffineH{e1, -1.0}, AffineH{e2, -1.0}}, SimpleSet::whole_space(2));
    Vector x(2);
    x << 2.0, 2.0;
    const auto est = distance_to_feasible(p, x, 1e-9);
    CHECK(est.converged);
    CHECK(est.value >= std::sqrt(2.0) - 1e-9);
    CHECK(est.value <= 2.0 + 1e-9);
  }
  SUBCASE("within 5% of the active-set enumeration on a 2-constraint polyhedron") {
    // h1: x1 <= 1, h2: x2 <= 1. From x = (3, 1.05) the exact projection is
    // the corner (1, 1), computed here by enumerating the active sets.
    Vector c1(2), c2(2);
    c1 << 1, 0;
    c2 << 0, 1;
    ProblemInstance p({LinearF{Vector::Zero(2)}}, {L1Component{}},
                      {AffineH{c1, -1.0}, AffineH{c2, -1.0}}, SimpleSet::whole_space(2));
    Vector x(2);
    x << 3.0, 1.05;
    // Candidates: projection onto each single hyperplane (if feasible) and
    // the corner where both are active.
    double exact = std::numeric_limits<double>::infinity();
    for (int mask = 1; mask < 4; ++mask) {
      Vector cand;
      if (mask == 1) {
        cand = x - ((c1.dot(x) - 1.0) / c1.squaredNorm()) * c1;
      } else if (mask == 2) {
        cand = x - ((c2.dot(x) - 1.0) / c2.squaredNorm()) * c2;
      } else {
        cand.resize(2);
        cand << 1.0, 1.0;  // both constraints active
      }
      if (p.max_constraint_violation(cand) <= 1e-10) {
        exact = std::min(exact, (cand - x).norm());
      }
    }
    REQUIRE(std::isfinite(exact));
    const auto est = distance_to_feasible(p, x, 1e-10);
    CHECK(est.converged);
    CHECK(est.value >= exact - 1e-8);
    CHECK(est.value <= 1.05 * exact);
  }
}

TEST_CASE("reference solver") {
  SUBCASE("halfspace projection problem: x* = (1,0), F* = 0.5") {
    const ProblemInstance p = halfspace_projection_problem();
    const ReferenceSolution ref = reference_solve(p, 1e-2);
    CHECK(ref.F_ref == doctest::Approx(0.5).epsilon(1e-4));
    CHECK((ref.x_ref - Vector(Vector::Unit(2, 0))).norm() <= 1e-2);
    CHECK(ref.feasibility_norm_ref <= 1e-6);
    CHECK(ref.method.find("grid-checked") != std::string::npos);
  }
  SUBCASE("tiny 1-D constrained problem: x* = 1, F* = 0.5") {
    const ProblemInstance p = tiny_1d();
    const ReferenceSolution ref = reference_solve(p, 1e-2);
    CHECK(ref.F_ref == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(ref.x_ref[0] == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("random 2-D lasso with one affine constraint vs the grid oracle") {
    Rng rng(55, 0);
    for (int t = 0; t < 5; ++t) {
      ConstrainedLassoSpec spec;
      spec.N = 4;
      spec.n = 2;
      spec.m_lin = 1;
      spec.m_soc = 0;
      spec.seed = 100 + t;
      const ProblemInstance p = make_constrained_lasso(spec);
      const ReferenceSolution ref = reference_solve(p, 1e-2);
      const GridResult g = grid_min(p, ref.x_ref, 2.0 + ref.x_ref.cwiseAbs().maxCoeff(), 1e-3);
      CHECK(std::abs(g.value - ref.F_ref) <= 1e-2);
    }
  }
  SUBCASE("deterministic and seed independent") {
    ConstrainedLassoSpec spec;
    spec.N = 6;
    spec.n = 3;
    spec.m_lin = 4;
    spec.m_soc = 1;
    spec.seed = 77;
    const ProblemInstance p = make_constrained_lasso(spec);
    const ReferenceSolution r1 = reference_solve(p, 1e-2);
    const ReferenceSolution r2 = reference_solve(p, 1e-2);
    CHECK(r1.F_ref == r2.F_ref);
    CHECK((r1.x_ref - r2.x_ref).norm() == 0.0);
  }
}

TEST_CASE("optimality gap") {
  const ProblemInstance p = halfspace_projection_problem();
  ReferenceSolution ref = reference_solve(p, 1e-2);

  SUBCASE("zero at the reference point") {
    CHECK(optimality_gap(p, ref.x_ref, ref) == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("the unconstrained minimizer has a negative gap") {
    Vector x(2);
    x << 2.0, 0.0;  // infeasible minimizer of the smooth part
    CHECK(optimality_gap(p, x, ref) < 0.0);
  }
  SUBCASE("instance mismatch is rejected") {
    ref.instance_hash = "0123456789abcdef";
    CHECK_THROWS_AS(optimality_gap(p, ref.x_ref, ref), InputError);
  }
}

TEST_CASE("distance loop reports non-convergence within a tiny budget") {
  // An anisotropic norm ball: the hyperplane steps overshoot the curved
  // boundary, so a 1e-14 target needs more than two corrections.
  Vector scale(2), cc(2);
  scale << 1.0, 3.0;
  cc << 0.0, 0.0;
  ProblemInstance q({LinearF{Vector::Zero(2)}}, {L1Component{}}, {SocH{scale, cc, -1.0}},
                    SimpleSet::whole_space(2));
  Vector x(2);
  x << 5.0, 7.0;
  const auto est = distance_to_feasible(q, x, 1e-14, /*max_iterations=*/2);
  CHECK(!est.converged);
  CHECK(est.iterations == 2);
  // with a realistic tolerance the same loop converges
  CHECK(distance_to_feasible(q, x, 1e-8).converged);
}

TEST_CASE("reference solver reports budget exhaustion with the best value") {
  ConstrainedLassoSpec spec;
  spec.N = 6;
  spec.n = 3;
  spec.m_lin = 4;
  spec.m_soc = 0;
  spec.seed = 3;
  const ProblemInstance p = make_constrained_lasso(spec);
  ReferenceOptions opt;
  opt.max_iterations = 3;  // far too few to settle
  CHECK_THROWS_AS(reference_solve(p, 1e-2, opt), ContractError);
}

TEST_CASE("gap decreases over doubling epoch windows on the averaged iterate") {
  ConstrainedLassoSpec spec;
  spec.N = 24;
  spec.n = 12;
  spec.m_lin = 20;
  spec.m_soc = 0;
  spec.seed = 6;
  auto p = std::make_shared<const ProblemInstance>(make_constrained_lasso(spec));
  const ReferenceSolution ref = reference_solve(*p, 1e-2);

  RunConfig cfg;
  cfg.problem = p;
  cfg.objective_law = SamplingLaw::nice(24, 1, WeightRule::inverse_probability);
  cfg.constraint_law = SamplingLaw::nice(20, 1, WeightRule::indicator);
  cfg.schedule = StepsizeSchedule::convex_decay(0.04, 0.5, 0.0);
  cfg.beta = 1.0;
  cfg.max_epochs = 160;
  cfg.tol_feasibility = 1e-9;  // never met: we want the whole curve
  cfg.tol_gap = 1e-9;
  cfg.F_ref = ref.F_ref;
  cfg.seed = 3;
  cfg.log_dist_estimate = false;
  const RunResult res = run(cfg);

  std::map<long, double> gap;
  for (const auto& r : res.log.records) gap[r.epoch] = r.f_gap;
  REQUIRE(gap.count(10) == 1);
  double prev = gap[10];
  for (long e : {20l, 40l, 80l, 160l}) {
    REQUIRE(gap.count(e) == 1);
    CHECK(gap[e] < prev);
    prev = gap[e];
  }
}

TEST_CASE("reference cache round-trips through disk") {
  const ProblemInstance p = tiny_1d();
  const std::string dir = "cache_test_tmp";
  std::filesystem::remove_all(dir);
  const ReferenceSolution r1 = load_or_solve_reference(p, 1e-2, dir);
  CHECK(!r1.instance_hash.empty());
  const ReferenceSolution r2 = load_or_solve_reference(p, 1e-2, dir);
  CHECK(r1.F_ref == r2.F_ref);
  CHECK(r1.instance_hash == r2.instance_hash);
  std::filesystem::remove_all(dir);
}

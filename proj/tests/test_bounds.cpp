#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "analysis.hpp"
#include "bounds.hpp"
#include "fem.hpp"
#include "model_io.hpp"

#include <cmath>
#include <random>

using namespace framecert;

namespace {

std::string model_path(const std::string& name) {
  return std::string(FRAMECERT_MODEL_DIR) + "/" + name;
}

fem::FrameModel single_axial_bar(double cbar) {
  std::vector<fem::Node> nodes{{1, 0.0, 0.0}, {2, 1.0, 0.0}};
  fem::Element e;
  e.id = 1;
  e.n1 = 1;
  e.n2 = 2;
  e.law = {"axial", 0.0, 0.0, 0.0};
  e.group = 1;
  fem::LoadCase lc;
  lc.id = 1;
  lc.compliance_bound = cbar;
  lc.loads.push_back({2, 1.0, 0.0, 0.0});
  return fem::FrameModel(nodes, {e}, {{1, true, true, true}}, {lc}, {{1, {1}}});
}

}  // namespace

TEST_CASE("single bar: delta* = 1 when cbar = 1") {
  fem::FrameModel bar = single_axial_bar(1.0);
  const fem::AssembledStiffness a = fem::assemble(bar);
  const bounds::ScalingResult r =
      bounds::scale_bisect(bar, a, Eigen::VectorXd::Ones(1));
  CHECK(r.delta_star == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.upper_bound_weight == doctest::Approx(1.0).epsilon(1e-8));
  REQUIRE(r.active_cases.size() == 1);
  CHECK(r.active_cases[0] == 0);
}

TEST_CASE("frame24: reference scaling factor and upper-bound weight") {
  fem::FrameModel model = model_io::load_model_file(model_path("frame24.json"));
  const fem::AssembledStiffness a = fem::assemble(model);
  const bounds::ScalingResult r =
      bounds::scale_bisect(model, a, Eigen::VectorXd::Ones(9));
  CHECK(r.delta_star == doctest::Approx(6.64e-3).epsilon(0.005));
  CHECK(r.upper_bound_weight == doctest::Approx(0.141).epsilon(0.005));
  // The bound is active at delta*.
  CHECK(r.compliances[0] == doctest::Approx(5000.0).epsilon(1e-5));
  // Feasibility and minimality.
  CHECK(r.compliances[0] <= 5000.0 * (1.0 + 1e-8));
  const double c_below =
      analysis::compliance(a, 0, 0.999 * r.feasible_design);
  CHECK(c_below > 5000.0);
}

TEST_CASE("part20: reference scaling factor and upper-bound weight") {
  fem::FrameModel model = model_io::load_model_file(model_path("part20.json"));
  const fem::AssembledStiffness a = fem::assemble(model);
  const bounds::ScalingResult r =
      bounds::scale_bisect(model, a, Eigen::VectorXd::Ones(13));
  CHECK(r.delta_star == doctest::Approx(2.678e-2).epsilon(0.005));
  CHECK(r.upper_bound_weight == doctest::Approx(0.285).epsilon(0.005));
  CHECK(r.compliances[0] <= 1000.0 * (1.0 + 1e-8));
}

TEST_CASE("infeasible direction reported with the offending load case") {
  // cbar below the infimum: no scaling can reach feasibility.
  fem::FrameModel model = model_io::load_model_file(model_path("part20.json"));
  std::vector<fem::LoadCase> cases = model.load_cases();
  cases[0].compliance_bound = 100.0;  // infimum is about 579
  fem::FrameModel tight(model.nodes(), model.elements(), model.supports(), cases,
                        model.groups());
  const fem::AssembledStiffness a = fem::assemble(tight);
  CHECK_THROWS_AS(bounds::scale_bisect(tight, a, Eigen::VectorXd::Ones(13)),
                  bounds::InfeasibleDirectionError);
}

TEST_CASE("box bounds") {
  fem::FrameModel bar = single_axial_bar(1.0);
  const bounds::BoxBounds b1 = bounds::box_bounds(bar, 0.141);
  CHECK(b1.upper[0] == doctest::Approx(0.141));

  // Linking: a group of two elements with rho*l = 1 each halves the bound.
  std::vector<fem::Node> nodes{{1, 0.0, 0.0}, {2, 1.0, 0.0}, {3, 2.0, 0.0}};
  fem::Element e1;
  e1.id = 1;
  e1.n1 = 1;
  e1.n2 = 2;
  e1.law = {"axial", 0.0, 0.0, 0.0};
  e1.group = 1;
  fem::Element e2 = e1;
  e2.id = 2;
  e2.n1 = 2;
  e2.n2 = 3;
  fem::LoadCase lc;
  lc.id = 1;
  lc.compliance_bound = 1.0;
  lc.loads.push_back({3, 1.0, 0.0, 0.0});
  fem::FrameModel chain(nodes, {e1, e2},
                        {{1, true, true, true}, {2, false, true, true}, {3, false, true, true}},
                        {lc}, {{1, {1, 2}}});
  const bounds::BoxBounds b2 = bounds::box_bounds(chain, 1.0);
  CHECK(b2.upper[0] == doctest::Approx(0.5));

  // frame24 group bounds reproduce by hand from member lengths.
  fem::FrameModel model = model_io::load_model_file(model_path("frame24.json"));
  const double wbar = 0.141;
  const bounds::BoxBounds b3 = bounds::box_bounds(model, wbar);
  const double diag = std::hypot(0.75, 0.5);
  const double expected[9] = {wbar / 2.0,          wbar / 2.0, wbar / 2.0,
                              wbar / 1.5,          wbar / 1.5, wbar / 1.5,
                              wbar / (4.0 * diag), wbar / (4.0 * diag),
                              wbar / (4.0 * diag)};
  for (int g = 0; g < 9; ++g) {
    CHECK(b3.upper[g] == doctest::Approx(expected[g]).epsilon(1e-12));
  }
}

TEST_CASE("scale_model: objective and substitution identities") {
  fem::FrameModel model = model_io::load_model_file(model_path("frame24.json"));
  const fem::AssembledStiffness a = fem::assemble(model);
  const bounds::ScalingResult sr =
      bounds::scale_bisect(model, a, Eigen::VectorXd::Ones(9));
  const bounds::BoxBounds box = bounds::box_bounds(model, sr.upper_bound_weight);
  const bounds::ScaledModel sm = bounds::scale_model(model, a, box);

  // a_s = -1 maps to the empty design with zero objective.
  const Eigen::VectorXd minus = Eigen::VectorXd::Constant(9, -1.0);
  CHECK(sm.unscale(minus).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(sm.objective_at(minus) == doctest::Approx(0.0).epsilon(1e-12));

  // a_s = +1 maps to the box bound; every group term then equals wbar.
  const Eigen::VectorXd plus = Eigen::VectorXd::Ones(9);
  CHECK((sm.unscale(plus) - box.upper).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(sm.objective_at(plus) ==
        doctest::Approx(9.0 * sr.upper_bound_weight).epsilon(1e-10));

  // Random points: the scaled objective equals the structural weight, the
  // substituted stiffness matches evaluation at the unscaled design, and
  // scale o unscale is the identity.
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> as(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd p(9);
    for (int g = 0; g < 9; ++g) p[g] = as(rng);
    const Eigen::VectorXd areas = sm.unscale(p);
    CHECK(sm.objective_at(p) ==
          doctest::Approx(fem::weight(model, areas)).epsilon(1e-12));
    CHECK((sm.scale(areas) - p).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::MatrixXd direct = a.stiffness_at(areas);
    const Eigen::MatrixXd sub = sm.stiffness_scaled.evaluate(p);
    CHECK((direct - sub).cwiseAbs().maxCoeff() <=
          1e-10 * (1.0 + direct.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("returned design is feasible and minimal") {
  fem::FrameModel model = model_io::load_model_file(model_path("part20.json"));
  const fem::AssembledStiffness a = fem::assemble(model);
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> ar(0.5, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd ratio(13);
    for (int g = 0; g < 13; ++g) ratio[g] = ar(rng);
    const bounds::ScalingResult r = bounds::scale_bisect(model, a, ratio);
    for (int j = 0; j < a.n_load_cases(); ++j) {
      CHECK(r.compliances[j] <=
            a.compliance_bounds[static_cast<size_t>(j)] * (1.0 + 1e-8));
    }
    const double c_below = analysis::compliance(a, 0, 0.999 * r.feasible_design);
    CHECK(c_below > a.compliance_bounds[0]);
  }
}

#pragma once

#include "poly.hpp"

#include <Eigen/Dense>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Frame model definition and assembly of the structural stiffness as a
// polynomial in the grouped cross-section areas,
//   K(a) = K0 + sum_g sum_{i=1..3} K^(i)_g a_g^i,
// with every coefficient matrix positive semidefinite.

namespace framecert::fem {

struct Node {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct Support {
  int node = 0;
  bool ux = false;
  bool uy = false;
  bool rot = false;
};

// Moment of inertia as a polynomial of the area: I(a) = k1 a + k2 a^2 + k3 a^3.
struct CrossSectionLaw {
  std::string name;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
};

// Laws for the bundled cross-section families (solid square, hollow square
// tube with outer size 10t and wall t, hollow rectangular 10t x 20t tube bent
// about the strong axis, circular tube with outer diameter 10t and wall t,
// rectangle of fixed width with variable height).
const std::map<std::string, CrossSectionLaw>& builtin_laws();
CrossSectionLaw rectangle_fixed_width_law(double width);

struct Element {
  int id = 0;
  int n1 = 0;
  int n2 = 0;
  double youngs_modulus = 1.0;
  double density = 1.0;
  CrossSectionLaw law;
  // Optimized elements carry a group id; constant elements a fixed area.
  std::optional<int> group;
  double fixed_area = 0.0;
};

struct PointLoad {
  int node = 0;
  double fx = 0.0;
  double fy = 0.0;
  double moment = 0.0;
};

struct LoadCase {
  int id = 0;
  double compliance_bound = 0.0;  // cbar_j > 0
  std::vector<PointLoad> loads;
};

class FrameModel {
 public:
  FrameModel(std::vector<Node> nodes, std::vector<Element> elements,
             std::vector<Support> supports, std::vector<LoadCase> load_cases,
             std::map<int, std::vector<int>> groups);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Support>& supports() const { return supports_; }
  const std::vector<LoadCase>& load_cases() const { return load_cases_; }
  const std::map<int, std::vector<int>>& groups() const { return groups_; }

  int n_vars() const { return static_cast<int>(groups_.size()); }
  // Group ids in variable order (ascending id).
  const std::vector<int>& group_ids() const { return group_ids_; }
  int group_index(int gid) const;

  const Node& node(int id) const;
  const Element& element(int id) const;
  double element_length(int id) const;

  // sum_{e in g} rho_e l_e, the objective multiplier of group g.
  double group_weight_coefficient(int gid) const;
  std::vector<double> weight_coefficients() const;  // in variable order

 private:
  void validate() const;

  std::vector<Node> nodes_;
  std::vector<Element> elements_;
  std::vector<Support> supports_;
  std::vector<LoadCase> load_cases_;
  std::map<int, std::vector<int>> groups_;
  std::vector<int> group_ids_;
  std::map<int, int> node_index_;
  std::map<int, int> element_index_;
};

// Stiffness of one element as a matrix polynomial in its own area, 6x6 in
// global coordinates, dofs (ux1, uy1, rot1, ux2, uy2, rot2).
poly::MatrixPolynomial element_stiffness(const FrameModel& model, int element_id);

struct AssembledStiffness {
  int n_dof = 0;
  // dof index per (node position, local dof 0..2); -1 when supported.
  std::vector<std::array<int, 3>> dof_map;
  Eigen::MatrixXd k0;                               // design-independent part
  std::vector<std::array<Eigen::MatrixXd, 3>> kpow; // per group, powers 1..3
  std::vector<Eigen::VectorXd> forces;              // per load case
  std::vector<double> compliance_bounds;            // cbar_j
  std::vector<double> weight_coefficients;          // per group

  int n_vars() const { return static_cast<int>(kpow.size()); }
  int n_load_cases() const { return static_cast<int>(forces.size()); }

  // K_j(a) = K0 + sum_g sum_i K^(i)_g a_g^i  (identical K for all cases).
  Eigen::MatrixXd stiffness_at(const Eigen::VectorXd& areas) const;
  // Design-dependent part only: sum_g sum_i K^(i)_g a_g^i.
  Eigen::MatrixXd design_part_at(const Eigen::VectorXd& areas) const;
  // d K / d a_g = sum_i i a_g^{i-1} K^(i)_g.
  Eigen::MatrixXd stiffness_derivative(const Eigen::VectorXd& areas, int g) const;
  // K(a) as a matrix polynomial in the group areas.
  poly::MatrixPolynomial as_matrix_polynomial() const;
};

// Assembles the model; verifies that K(1) is positive definite for every
// load case (rigid body motions forbidden once all optimized elements are
// present).  Throws std::runtime_error naming the offending load case.
AssembledStiffness assemble(const FrameModel& model);

// Structural weight of the optimized groups: sum_g a_g sum_{e in g} rho_e l_e.
double weight(const FrameModel& model, const Eigen::VectorXd& areas);

}  // namespace framecert::fem

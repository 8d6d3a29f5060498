#include "fem.hpp"

#include <Eigen/Cholesky>

#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace framecert::fem {

const std::map<std::string, CrossSectionLaw>& builtin_laws() {
  static const std::map<std::string, CrossSectionLaw> laws = [] {
    std::map<std::string, CrossSectionLaw> m;
    // Solid square of side s: A = s^2, I = s^4/12 = A^2/12.
    m["solid-square"] = {"solid-square", 0.0, 1.0 / 12.0, 0.0};
    // Hollow square tube, outer 10t, wall t: A = 36 t^2, I = 492 t^4.
    m["square-tube"] = {"square-tube", 0.0, 41.0 / 108.0, 0.0};
    // Hollow rectangular 10t x 20t tube, wall t, strong axis:
    // A = 56 t^2, I = 33344/12 t^4.
    m["rect-tube-strong"] = {"rect-tube-strong", 0.0, 33344.0 / 37632.0, 0.0};
    // Circular tube, outer diameter 10t, wall t: A = 9 pi t^2,
    // I = 369 pi / 4 t^4.
    m["circular-tube"] = {"circular-tube", 0.0,
                          369.0 / (324.0 * std::numbers::pi), 0.0};
    return m;
  }();
  return laws;
}

CrossSectionLaw rectangle_fixed_width_law(double width) {
  if (width <= 0.0) throw std::invalid_argument("rectangle width must be > 0");
  // I = b h^3 / 12 with a = b h.
  return {"rectangle-b=" + std::to_string(width), 0.0, 0.0,
          1.0 / (12.0 * width * width)};
}

FrameModel::FrameModel(std::vector<Node> nodes, std::vector<Element> elements,
                       std::vector<Support> supports,
                       std::vector<LoadCase> load_cases,
                       std::map<int, std::vector<int>> groups)
    : nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      supports_(std::move(supports)),
      load_cases_(std::move(load_cases)),
      groups_(std::move(groups)) {
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!node_index_.emplace(nodes_[i].id, static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate node id " + std::to_string(nodes_[i].id));
    }
  }
  for (size_t i = 0; i < elements_.size(); ++i) {
    if (!element_index_.emplace(elements_[i].id, static_cast<int>(i)).second) {
      throw std::invalid_argument("duplicate element id " +
                                  std::to_string(elements_[i].id));
    }
  }
  for (const auto& [gid, members] : groups_) group_ids_.push_back(gid);
  validate();
}

void FrameModel::validate() const {
  std::map<int, int> membership;  // element id -> group id
  for (const auto& [gid, members] : groups_) {
    if (members.empty()) {
      throw std::invalid_argument("group " + std::to_string(gid) + " is empty");
    }
    for (int eid : members) {
      if (!membership.emplace(eid, gid).second) {
        throw std::invalid_argument("element " + std::to_string(eid) +
                                    " belongs to more than one group");
      }
    }
  }
  for (const auto& e : elements_) {
    if (node_index_.find(e.n1) == node_index_.end() ||
        node_index_.find(e.n2) == node_index_.end()) {
      throw std::invalid_argument("element " + std::to_string(e.id) +
                                  " references a missing node");
    }
    if (element_length(e.id) <= 0.0) {
      throw std::invalid_argument("element " + std::to_string(e.id) +
                                  " has zero length");
    }
    if (e.youngs_modulus <= 0.0 || e.density <= 0.0) {
      throw std::invalid_argument("element " + std::to_string(e.id) +
                                  " needs E > 0 and rho > 0");
    }
    if (e.law.k1 < 0.0 || e.law.k2 < 0.0 || e.law.k3 < 0.0) {
      throw std::invalid_argument("cross-section law '" + e.law.name +
                                  "' needs nonnegative inertia coefficients");
    }
    auto it = membership.find(e.id);
    if (e.group.has_value()) {
      if (it == membership.end() || it->second != *e.group) {
        throw std::invalid_argument("element " + std::to_string(e.id) +
                                    " group link inconsistent with groups map");
      }
    } else {
      if (it != membership.end()) {
        throw std::invalid_argument("fixed element " + std::to_string(e.id) +
                                    " listed in groups map");
      }
      if (e.fixed_area < 0.0) {
        throw std::invalid_argument("fixed element " + std::to_string(e.id) +
                                    " needs a nonnegative area");
      }
    }
  }
  for (const auto& [gid, members] : groups_) {
    for (int eid : members) {
      const Element& e = element(eid);
      if (!e.group.has_value() || *e.group != gid) {
        throw std::invalid_argument("groups map lists element " +
                                    std::to_string(eid) +
                                    " that does not link back to group " +
                                    std::to_string(gid));
      }
    }
  }
  for (const auto& s : supports_) {
    if (node_index_.find(s.node) == node_index_.end()) {
      throw std::invalid_argument("support references missing node " +
                                  std::to_string(s.node));
    }
  }
  if (load_cases_.empty()) throw std::invalid_argument("model has no load case");
  for (const auto& lc : load_cases_) {
    if (lc.compliance_bound <= 0.0) {
      throw std::invalid_argument("load case " + std::to_string(lc.id) +
                                  " needs cbar > 0");
    }
    for (const auto& l : lc.loads) {
      if (node_index_.find(l.node) == node_index_.end()) {
        throw std::invalid_argument("load references missing node " +
                                    std::to_string(l.node));
      }
    }
  }
  if (groups_.empty()) throw std::invalid_argument("model has no design group");
}

int FrameModel::group_index(int gid) const {
  for (size_t i = 0; i < group_ids_.size(); ++i) {
    if (group_ids_[i] == gid) return static_cast<int>(i);
  }
  throw std::invalid_argument("unknown group id " + std::to_string(gid));
}

const Node& FrameModel::node(int id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) {
    throw std::invalid_argument("unknown node id " + std::to_string(id));
  }
  return nodes_[static_cast<size_t>(it->second)];
}

const Element& FrameModel::element(int id) const {
  auto it = element_index_.find(id);
  if (it == element_index_.end()) {
    throw std::invalid_argument("unknown element id " + std::to_string(id));
  }
  return elements_[static_cast<size_t>(it->second)];
}

double FrameModel::element_length(int id) const {
  const Element& e = element(id);
  const Node& p = node(e.n1);
  const Node& q = node(e.n2);
  return std::hypot(q.x - p.x, q.y - p.y);
}

double FrameModel::group_weight_coefficient(int gid) const {
  auto it = groups_.find(gid);
  if (it == groups_.end()) {
    throw std::invalid_argument("unknown group id " + std::to_string(gid));
  }
  double sum = 0.0;
  for (int eid : it->second) {
    const Element& e = element(eid);
    sum += e.density * element_length(eid);
  }
  return sum;
}

std::vector<double> FrameModel::weight_coefficients() const {
  std::vector<double> c;
  c.reserve(group_ids_.size());
  for (int gid : group_ids_) c.push_back(group_weight_coefficient(gid));
  return c;
}

poly::MatrixPolynomial element_stiffness(const FrameModel& model, int element_id) {
  const Element& e = model.element(element_id);
  const Node& p = model.node(e.n1);
  const Node& q = model.node(e.n2);
  const double L = model.element_length(element_id);
  const double c = (q.x - p.x) / L;
  const double s = (q.y - p.y) / L;
  const double E = e.youngs_modulus;

  // Local axial pattern, unit EA/L.
  Eigen::MatrixXd axial = Eigen::MatrixXd::Zero(6, 6);
  axial(0, 0) = 1.0;
  axial(0, 3) = -1.0;
  axial(3, 0) = -1.0;
  axial(3, 3) = 1.0;
  axial *= E / L;

  // Local bending pattern, unit EI.
  Eigen::MatrixXd bend = Eigen::MatrixXd::Zero(6, 6);
  const double L2 = L * L;
  const double L3 = L2 * L;
  const int idx[4] = {1, 2, 4, 5};
  const double B[4][4] = {{12.0 / L3, 6.0 / L2, -12.0 / L3, 6.0 / L2},
                          {6.0 / L2, 4.0 / L, -6.0 / L2, 2.0 / L},
                          {-12.0 / L3, -6.0 / L2, 12.0 / L3, -6.0 / L2},
                          {6.0 / L2, 2.0 / L, -6.0 / L2, 4.0 / L}};
  for (int r = 0; r < 4; ++r) {
    for (int cc = 0; cc < 4; ++cc) bend(idx[r], idx[cc]) = E * B[r][cc];
  }

  // Rotation to global axes: local = T * global.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(6, 6);
  for (int nodeBlock = 0; nodeBlock < 2; ++nodeBlock) {
    const int o = 3 * nodeBlock;
    T(o + 0, o + 0) = c;
    T(o + 0, o + 1) = s;
    T(o + 1, o + 0) = -s;
    T(o + 1, o + 1) = c;
    T(o + 2, o + 2) = 1.0;
  }
  const Eigen::MatrixXd axial_g = T.transpose() * axial * T;
  const Eigen::MatrixXd bend_g = T.transpose() * bend * T;

  const double kappa[3] = {e.law.k1, e.law.k2, e.law.k3};
  poly::MatrixPolynomial K(1, 6);
  for (int power = 1; power <= 3; ++power) {
    Eigen::MatrixXd coeff = kappa[power - 1] * bend_g;
    if (power == 1) coeff += axial_g;
    if (coeff.cwiseAbs().maxCoeff() > 0.0) {
      K.add_term(poly::MultiIndex::unit(1, 0, power), coeff);
    }
  }
  return K;
}

Eigen::MatrixXd AssembledStiffness::stiffness_at(const Eigen::VectorXd& areas) const {
  return k0 + design_part_at(areas);
}

Eigen::MatrixXd AssembledStiffness::design_part_at(const Eigen::VectorXd& areas) const {
  if (areas.size() != n_vars()) {
    throw std::invalid_argument("area vector dimension mismatch");
  }
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n_dof, n_dof);
  for (int g = 0; g < n_vars(); ++g) {
    double ap = 1.0;
    for (int i = 0; i < 3; ++i) {
      ap *= areas[g];
      if (kpow[static_cast<size_t>(g)][static_cast<size_t>(i)].size() > 0) {
        K += ap * kpow[static_cast<size_t>(g)][static_cast<size_t>(i)];
      }
    }
  }
  return K;
}

Eigen::MatrixXd AssembledStiffness::stiffness_derivative(const Eigen::VectorXd& areas,
                                                         int g) const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n_dof, n_dof);
  double ap = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (kpow[static_cast<size_t>(g)][static_cast<size_t>(i)].size() > 0) {
      D += (i + 1) * ap * kpow[static_cast<size_t>(g)][static_cast<size_t>(i)];
    }
    ap *= areas[g];
  }
  return D;
}

poly::MatrixPolynomial AssembledStiffness::as_matrix_polynomial() const {
  poly::MatrixPolynomial K(n_vars(), n_dof);
  if (k0.cwiseAbs().maxCoeff() > 0.0) {
    K.add_term(poly::MultiIndex::zero(n_vars()), k0);
  }
  for (int g = 0; g < n_vars(); ++g) {
    for (int i = 0; i < 3; ++i) {
      const Eigen::MatrixXd& m = kpow[static_cast<size_t>(g)][static_cast<size_t>(i)];
      if (m.size() > 0 && m.cwiseAbs().maxCoeff() > 0.0) {
        K.add_term(poly::MultiIndex::unit(n_vars(), g, i + 1), m);
      }
    }
  }
  return K;
}

AssembledStiffness assemble(const FrameModel& model) {
  AssembledStiffness out;

  // Dof numbering: (ux, uy, rot) per node, nodes in input order, supported
  // dofs removed.
  std::map<int, std::array<bool, 3>> fixed;
  for (const auto& s : model.supports()) {
    auto& f = fixed[s.node];
    f[0] = f[0] || s.ux;
    f[1] = f[1] || s.uy;
    f[2] = f[2] || s.rot;
  }
  out.dof_map.resize(model.nodes().size());
  int next = 0;
  for (size_t ni = 0; ni < model.nodes().size(); ++ni) {
    const auto it = fixed.find(model.nodes()[ni].id);
    for (int d = 0; d < 3; ++d) {
      const bool is_fixed = it != fixed.end() && it->second[static_cast<size_t>(d)];
      out.dof_map[ni][static_cast<size_t>(d)] = is_fixed ? -1 : next++;
    }
  }
  out.n_dof = next;

  std::map<int, int> node_pos;
  for (size_t ni = 0; ni < model.nodes().size(); ++ni) {
    node_pos[model.nodes()[ni].id] = static_cast<int>(ni);
  }

  out.k0 = Eigen::MatrixXd::Zero(out.n_dof, out.n_dof);
  out.kpow.resize(static_cast<size_t>(model.n_vars()));
  for (auto& arr : out.kpow) {
    for (auto& m : arr) m = Eigen::MatrixXd();
  }

  auto scatter = [&](const Eigen::MatrixXd& ke, const Element& e,
                     Eigen::MatrixXd& target) {
    int gdof[6];
    const int p1 = node_pos.at(e.n1);
    const int p2 = node_pos.at(e.n2);
    for (int d = 0; d < 3; ++d) {
      gdof[d] = out.dof_map[static_cast<size_t>(p1)][static_cast<size_t>(d)];
      gdof[3 + d] = out.dof_map[static_cast<size_t>(p2)][static_cast<size_t>(d)];
    }
    for (int r = 0; r < 6; ++r) {
      if (gdof[r] < 0) continue;
      for (int c = 0; c < 6; ++c) {
        if (gdof[c] < 0) continue;
        target(gdof[r], gdof[c]) += ke(r, c);
      }
    }
  };

  for (const auto& e : model.elements()) {
    const poly::MatrixPolynomial ke = element_stiffness(model, e.id);
    if (e.group.has_value()) {
      const int g = model.group_index(*e.group);
      for (int power = 1; power <= 3; ++power) {
        const Eigen::MatrixXd* coeff =
            ke.term(poly::MultiIndex::unit(1, 0, power));
        if (!coeff) continue;
        Eigen::MatrixXd& target =
            out.kpow[static_cast<size_t>(g)][static_cast<size_t>(power - 1)];
        if (target.size() == 0) {
          target = Eigen::MatrixXd::Zero(out.n_dof, out.n_dof);
        }
        scatter(*coeff, e, target);
      }
    } else {
      Eigen::VectorXd a(1);
      a << e.fixed_area;
      scatter(ke.evaluate(a), e, out.k0);
    }
  }

  for (const auto& lc : model.load_cases()) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(out.n_dof);
    for (const auto& l : lc.loads) {
      const int pos = node_pos.at(l.node);
      const double vals[3] = {l.fx, l.fy, l.moment};
      for (int d = 0; d < 3; ++d) {
        const int dof = out.dof_map[static_cast<size_t>(pos)][static_cast<size_t>(d)];
        // Loads on supported dofs are carried by the reactions directly.
        if (dof >= 0) f[dof] += vals[d];
      }
    }
    if (f.norm() == 0.0) {
      throw std::runtime_error("load case " + std::to_string(lc.id) +
                               " has zero reduced force vector");
    }
    out.forces.push_back(std::move(f));
    out.compliance_bounds.push_back(lc.compliance_bound);
  }

  out.weight_coefficients = model.weight_coefficients();

  // Assumption check: with all group areas at one, the structure must be
  // stable for every load case.
  const Eigen::MatrixXd k1 =
      out.stiffness_at(Eigen::VectorXd::Ones(model.n_vars()));
  Eigen::LLT<Eigen::MatrixXd> llt(k1);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "stiffness at unit areas is not positive definite (load case";
    for (const auto& lc : model.load_cases()) msg << " " << lc.id;
    msg << "): rigid body motions are not forbidden";
    throw std::runtime_error(msg.str());
  }
  return out;
}

double weight(const FrameModel& model, const Eigen::VectorXd& areas) {
  if (areas.size() != model.n_vars()) {
    throw std::invalid_argument("area vector dimension mismatch");
  }
  const std::vector<double> coef = model.weight_coefficients();
  double w = 0.0;
  for (int g = 0; g < model.n_vars(); ++g) {
    if (areas[g] < 0.0) throw std::invalid_argument("areas must be nonnegative");
    w += areas[g] * coef[static_cast<size_t>(g)];
  }
  return w;
}

}  // namespace framecert::fem

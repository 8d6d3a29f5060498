#include "analysis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace framecert::analysis {

namespace {

struct EigPseudo {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
  double cutoff = 0.0;
  int rank = 0;

  Eigen::VectorXd apply_pinv(const Eigen::VectorXd& f) const {
    const Eigen::VectorXd proj = vectors.transpose() * f;
    Eigen::VectorXd scaled = Eigen::VectorXd::Zero(proj.size());
    for (int i = 0; i < proj.size(); ++i) {
      if (values[i] > cutoff) scaled[i] = proj[i] / values[i];
    }
    return vectors * scaled;
  }

  // || (I - K K^+) f || / || f ||
  double range_defect(const Eigen::VectorXd& f) const {
    const double fn = f.norm();
    if (fn == 0.0) return 0.0;
    const Eigen::VectorXd proj = vectors.transpose() * f;
    double outside = 0.0;
    for (int i = 0; i < proj.size(); ++i) {
      if (values[i] <= cutoff) outside += proj[i] * proj[i];
    }
    return std::sqrt(outside) / fn;
  }
};

EigPseudo eig_pseudo(const Eigen::MatrixXd& K, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("symmetric eigendecomposition failed");
  }
  EigPseudo out;
  out.vectors = es.eigenvectors();
  out.values = es.eigenvalues();
  const double lmax = out.values.size() == 0
                          ? 0.0
                          : std::max(0.0, out.values.maxCoeff());
  out.cutoff = static_cast<double>(K.rows()) * lmax * tol.rank_cutoff;
  for (int i = 0; i < out.values.size(); ++i) {
    if (out.values[i] > out.cutoff) ++out.rank;
  }
  return out;
}

Eigen::VectorXd pinv_solve_checked(const Eigen::MatrixXd& K,
                                   const Eigen::VectorXd& f,
                                   const Tolerances& tol,
                                   const std::string& what) {
  const EigPseudo eig = eig_pseudo(K, tol);
  const double defect = eig.range_defect(f);
  if (defect > tol.range_tol) {
    throw RangeError(what + ": force leaves the stiffness range (defect " +
                     std::to_string(defect) + ")");
  }
  return eig.apply_pinv(f);
}

}  // namespace

double compliance(const fem::AssembledStiffness& assembled, int load_case,
                  const Eigen::VectorXd& areas, const Tolerances& tol) {
  const Eigen::VectorXd& f = assembled.forces.at(static_cast<size_t>(load_case));
  const Eigen::MatrixXd K = assembled.stiffness_at(areas);
  const Eigen::VectorXd u = pinv_solve_checked(K, f, tol,
                                               "load case " + std::to_string(load_case));
  return f.dot(u);
}

double compliance_fast(const fem::AssembledStiffness& assembled, int load_case,
                       const Eigen::VectorXd& areas, const Tolerances& tol) {
  const Eigen::VectorXd& f = assembled.forces.at(static_cast<size_t>(load_case));
  const Eigen::MatrixXd K = assembled.stiffness_at(areas);
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() == Eigen::Success) {
    const Eigen::VectorXd u = llt.solve(f);
    const double defect = (K * u - f).norm() / std::max(f.norm(), 1e-300);
    if (defect <= tol.range_tol) return f.dot(u);
  }
  const Eigen::VectorXd u = pinv_solve_checked(K, f, tol,
                                               "load case " + std::to_string(load_case));
  return f.dot(u);
}

Eigen::VectorXd compliance_gradient(const fem::AssembledStiffness& assembled,
                                    int load_case, const Eigen::VectorXd& areas,
                                    const Tolerances& tol) {
  const Eigen::VectorXd& f = assembled.forces.at(static_cast<size_t>(load_case));
  const Eigen::MatrixXd K = assembled.stiffness_at(areas);
  const Eigen::VectorXd u = pinv_solve_checked(K, f, tol,
                                               "load case " + std::to_string(load_case));
  Eigen::VectorXd grad(assembled.n_vars());
  for (int g = 0; g < assembled.n_vars(); ++g) {
    grad[g] = -u.dot(assembled.stiffness_derivative(areas, g) * u);
  }
  return grad;
}

Eigen::MatrixXd PartitionedSystem::k_a_at(const Eigen::VectorXd& areas) const {
  Eigen::MatrixXd K = k_a0;
  for (size_t g = 0; g < k_a_pow.size(); ++g) {
    double ap = 1.0;
    for (int i = 0; i < 3; ++i) {
      ap *= areas[static_cast<int>(g)];
      if (k_a_pow[g][static_cast<size_t>(i)].size() > 0) {
        K += ap * k_a_pow[g][static_cast<size_t>(i)];
      }
    }
  }
  return K;
}

Eigen::MatrixXd PartitionedSystem::reassemble(const Eigen::VectorXd& areas) const {
  const int n = static_cast<int>(u_r.rows());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  K += u_r * k_a_at(areas) * u_r.transpose();
  if (kernel_dim() > 0) {
    K += u_n * k_ab * u_r.transpose() + u_r * k_ab.transpose() * u_n.transpose();
    K += u_n * k_b * u_n.transpose();
  }
  return K;
}

PartitionedSystem partition(const fem::AssembledStiffness& assembled,
                            int load_case, const Eigen::VectorXd& ratio,
                            const Tolerances& tol) {
  PartitionedSystem out;
  out.load_case = load_case;
  out.cbar = assembled.compliance_bounds.at(static_cast<size_t>(load_case));

  const Eigen::MatrixXd D = assembled.design_part_at(ratio);
  const EigPseudo eig = eig_pseudo(D, tol);
  const int n = assembled.n_dof;
  const int b = n - eig.rank;
  // Eigenvalues ascend, so kernel vectors lead.
  out.u_n = eig.vectors.leftCols(b);
  out.u_r = eig.vectors.rightCols(eig.rank);

  out.k_a0 = out.u_r.transpose() * assembled.k0 * out.u_r;
  out.k_a_pow.resize(static_cast<size_t>(assembled.n_vars()));
  for (int g = 0; g < assembled.n_vars(); ++g) {
    for (int i = 0; i < 3; ++i) {
      const Eigen::MatrixXd& m =
          assembled.kpow[static_cast<size_t>(g)][static_cast<size_t>(i)];
      if (m.size() > 0) {
        out.k_a_pow[static_cast<size_t>(g)][static_cast<size_t>(i)] =
            out.u_r.transpose() * m * out.u_r;
      }
    }
  }
  out.k_ab = out.u_n.transpose() * assembled.k0 * out.u_r;
  out.k_b = out.u_n.transpose() * assembled.k0 * out.u_n;
  const Eigen::VectorXd& f = assembled.forces.at(static_cast<size_t>(load_case));
  out.f_a = out.u_r.transpose() * f;
  out.f_b = out.u_n.transpose() * f;
  return out;
}

double compliance_infimum(const PartitionedSystem& p, const Tolerances& tol) {
  if (p.kernel_dim() == 0) return 0.0;
  const Eigen::VectorXd u = pinv_solve_checked(
      p.k_b, p.f_b, tol, "kernel block of load case " + std::to_string(p.load_case));
  return p.f_b.dot(u);
}

bool infimum_ray_condition(const fem::AssembledStiffness& assembled,
                           const PartitionedSystem& p,
                           const Eigen::VectorXd& ratio,
                           const Tolerances& tol) {
  if (p.image_dim() == 0) return true;
  const Eigen::MatrixXd proj =
      p.u_r.transpose() * assembled.design_part_at(ratio) * p.u_r;
  return eig_pseudo(proj, tol).range_defect(p.f_a) <= tol.range_tol;
}

std::optional<double> compliance_supremum(const PartitionedSystem& p,
                                          const Tolerances& tol) {
  double offset = 0.0;
  Eigen::VectorXd f_sch = p.f_a;
  Eigen::MatrixXd k_sch0 = p.k_a0;
  if (p.kernel_dim() > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(p.k_b);
    if (llt.info() != Eigen::Success) {
      // Kernel block singular: the load is not carriable even in the stiff
      // limit, the compliance range is empty upward.
      return std::nullopt;
    }
    offset = p.f_b.dot(llt.solve(p.f_b));
    f_sch -= p.k_ab.transpose() * llt.solve(p.f_b);
    k_sch0 -= p.k_ab.transpose() * llt.solve(p.k_ab);
  }
  const EigPseudo eig = eig_pseudo(k_sch0, tol);
  if (eig.range_defect(f_sch) > tol.range_tol) return std::nullopt;
  return f_sch.dot(eig.apply_pinv(f_sch)) + offset;
}

double schur_compliance(const PartitionedSystem& p, const Eigen::VectorXd& areas,
                        const Tolerances& tol) {
  Eigen::MatrixXd k_sch = p.k_a_at(areas);
  Eigen::VectorXd f_sch = p.f_a;
  if (p.kernel_dim() > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(p.k_b);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("kernel block is singular");
    }
    k_sch -= p.k_ab.transpose() * llt.solve(p.k_ab);
    f_sch -= p.k_ab.transpose() * llt.solve(p.f_b);
  }
  const EigPseudo eig = eig_pseudo(k_sch, tol);
  if (eig.range_defect(f_sch) > tol.range_tol) {
    throw RangeError("condensed force leaves the condensed stiffness range");
  }
  return f_sch.dot(eig.apply_pinv(f_sch));
}

poly::MatrixPolynomial compliance_lmi(const fem::AssembledStiffness& assembled,
                                      int load_case,
                                      const PartitionedSystem& p,
                                      bool allow_reduction) {
  const int nv = assembled.n_vars();
  const Eigen::VectorXd& f = assembled.forces.at(static_cast<size_t>(load_case));
  const double cbar = assembled.compliance_bounds.at(static_cast<size_t>(load_case));

  if (!allow_reduction || p.kernel_dim() == 0) {
    const int side = assembled.n_dof + 1;
    poly::MatrixPolynomial G(nv, side);
    Eigen::MatrixXd c0 = Eigen::MatrixXd::Zero(side, side);
    c0(0, 0) = cbar;
    c0.block(0, 1, 1, assembled.n_dof) = -f.transpose();
    c0.block(1, 0, assembled.n_dof, 1) = -f;
    c0.block(1, 1, assembled.n_dof, assembled.n_dof) = assembled.k0;
    G.add_term(poly::MultiIndex::zero(nv), c0);
    for (int g = 0; g < nv; ++g) {
      for (int i = 0; i < 3; ++i) {
        const Eigen::MatrixXd& m =
            assembled.kpow[static_cast<size_t>(g)][static_cast<size_t>(i)];
        if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) continue;
        Eigen::MatrixXd ci = Eigen::MatrixXd::Zero(side, side);
        ci.block(1, 1, assembled.n_dof, assembled.n_dof) = m;
        G.add_term(poly::MultiIndex::unit(nv, g, i + 1), ci);
      }
    }
    return G;
  }

  // Constant corner M = [[cbar, -f_B'], [-f_B, K_B]] eliminated by the Schur
  // complement lemma; requires M > 0, i.e. inf c < cbar.
  const int b = p.kernel_dim();
  const int r = p.image_dim();
  Eigen::MatrixXd M(b + 1, b + 1);
  M(0, 0) = cbar;
  M.block(0, 1, 1, b) = -p.f_b.transpose();
  M.block(1, 0, b, 1) = -p.f_b;
  M.block(1, 1, b, b) = p.k_b;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(
        "compliance bound not above the infimum: constant corner of the "
        "compliance block is not positive definite (load case " +
        std::to_string(load_case) + ")");
  }
  Eigen::MatrixXd C(r, b + 1);  // coupling of the design block to the corner
  C.col(0) = -p.f_a;
  C.rightCols(b) = p.k_ab.transpose();
  const Eigen::MatrixXd correction = C * llt.solve(C.transpose());

  poly::MatrixPolynomial G(nv, r);
  Eigen::MatrixXd c0 = p.k_a0 - correction;
  G.add_term(poly::MultiIndex::zero(nv), 0.5 * (c0 + c0.transpose()));
  for (int g = 0; g < nv; ++g) {
    for (int i = 0; i < 3; ++i) {
      const Eigen::MatrixXd& m = p.k_a_pow[static_cast<size_t>(g)][static_cast<size_t>(i)];
      if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) continue;
      G.add_term(poly::MultiIndex::unit(nv, g, i + 1), 0.5 * (m + m.transpose()));
    }
  }
  return G;
}

}  // namespace framecert::analysis

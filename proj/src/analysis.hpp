#pragma once

#include "fem.hpp"
#include "poly.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

// Compliance evaluation and its structure: pseudo-inverse compliance,
// kernel/image partitioning of the design-dependent stiffness, Schur
// condensation, range of the compliance function, analytic gradient.

namespace framecert::analysis {

// Load cannot be carried: f leaves the range of K(a).
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  // Eigenvalues below n * lambda_max * rank_cutoff are treated as zero.
  double rank_cutoff = 1e-12;
  // Relative tolerance of the range-membership test.
  double range_tol = 1e-8;
};

// c_j(a) = f_j' K_j(a)^+ f_j via symmetric eigendecomposition with rank
// cutoff.  Throws RangeError when f_j leaves Im(K_j(a)).
double compliance(const fem::AssembledStiffness& assembled, int load_case,
                  const Eigen::VectorXd& areas, const Tolerances& tol = {});

// Factorization fast path for positive definite K; falls back to the
// eigendecomposition route when the factorization is not trustworthy.
double compliance_fast(const fem::AssembledStiffness& assembled, int load_case,
                       const Eigen::VectorXd& areas, const Tolerances& tol = {});

// grad_g c_j(a) = -f' K^+ (dK/da_g) K^+ f; every component <= 0.
Eigen::VectorXd compliance_gradient(const fem::AssembledStiffness& assembled,
                                    int load_case, const Eigen::VectorXd& areas,
                                    const Tolerances& tol = {});

// Partition of K_j(a) by the kernel/image of the design-dependent part
// sum_g sum_i K^(i)_g atilde_g^i.  The B-blocks depend on K0 only.
struct PartitionedSystem {
  int load_case = 0;
  double cbar = 0.0;
  Eigen::MatrixXd u_r;   // image basis, n_dof x r
  Eigen::MatrixXd u_n;   // kernel basis, n_dof x b
  Eigen::MatrixXd k_a0;  // U_R' K0 U_R
  std::vector<std::array<Eigen::MatrixXd, 3>> k_a_pow;  // U_R' K^(i)_g U_R
  Eigen::MatrixXd k_ab;  // U_N' K0 U_R
  Eigen::MatrixXd k_b;   // U_N' K0 U_N
  Eigen::VectorXd f_a;
  Eigen::VectorXd f_b;

  int image_dim() const { return static_cast<int>(u_r.cols()); }
  int kernel_dim() const { return static_cast<int>(u_n.cols()); }
  // K_A(a) = U_R' K(a) U_R.
  Eigen::MatrixXd k_a_at(const Eigen::VectorXd& areas) const;
  // K(a) reconstructed from the blocks, for consistency checks.
  Eigen::MatrixXd reassemble(const Eigen::VectorXd& areas) const;
};

PartitionedSystem partition(const fem::AssembledStiffness& assembled,
                            int load_case, const Eigen::VectorXd& ratio,
                            const Tolerances& tol = {});

// inf_a c_j = f_B' K_B^{-1} f_B; zero when the kernel is empty.  Throws
// RangeError when f_B leaves Im(K_B) (load not carriable along the ray).
double compliance_infimum(const PartitionedSystem& p, const Tolerances& tol = {});

// Whether the infimum along the scaling ray equals the global infimum:
// f_A must lie in the image of the projected design part at the ratio the
// partition was built with.  True by construction for partitions built at
// the same ratio; kept as an explicit diagnostic.
bool infimum_ray_condition(const fem::AssembledStiffness& assembled,
                           const PartitionedSystem& p,
                           const Eigen::VectorXd& ratio,
                           const Tolerances& tol = {});

// sup_a c_j = lim_{a->0+} c_j(a); empty optional encodes +infinity.
std::optional<double> compliance_supremum(const PartitionedSystem& p,
                                          const Tolerances& tol = {});

// Condensed compliance c_sch(a) = f_sch' K_sch(a)^{-1} f_sch with
// K_sch = K_A - K_AB' K_B^{-1} K_AB;  c(a) = c_sch(a) + f_B' K_B^{-1} f_B.
double schur_compliance(const PartitionedSystem& p, const Eigen::VectorXd& areas,
                        const Tolerances& tol = {});

// The compliance constraint of one load case as a polynomial matrix
// inequality in the group areas.
//
// With an empty kernel this is the bordered block
//   [[cbar, -f'], [-f, K(a)]]  (side n_dof + 1).
// With a nonempty kernel the constant corner [[cbar, -f_B'], [-f_B, K_B]]
// is eliminated by the Schur complement lemma, leaving the reduced block
//   K_A(a) - C M^{-1} C'  (side = image dimension),
// which is valid whenever inf c < cbar.
poly::MatrixPolynomial compliance_lmi(const fem::AssembledStiffness& assembled,
                                      int load_case,
                                      const PartitionedSystem& p,
                                      bool allow_reduction = true);

}  // namespace framecert::analysis

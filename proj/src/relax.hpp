#pragma once

#include "poly.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

// Order-r moment relaxation of the scaled problem: the moment matrix, scalar
// localizing matrices for the box constraints, and polynomial-matrix-
// inequality localizing matrices for the compliance blocks.

namespace framecert::relax {

// Bijection between the truncated monomial basis b_{2r} and positions of the
// moment vector y.  The constant moment y_0 is pinned to one and eliminated,
// so y has |b_{2r}| - 1 entries.
class MomentIndexMap {
 public:
  MomentIndexMap(int n_vars, int order);

  int n_vars() const { return basis_.n_vars(); }
  int order() const { return order_; }
  const poly::MonomialBasis& basis() const { return basis_; }
  int y_dim() const { return basis_.size() - 1; }

  // Position of a non-constant monomial in y; throws on the constant or on
  // monomials beyond degree 2r.
  int y_index(const poly::MultiIndex& m) const;
  const poly::MultiIndex& monomial(int y_index) const;

 private:
  int order_;
  poly::MonomialBasis basis_;  // b_{2r}
};

struct BlockEntry {
  int y = -1;  // -1 marks the constant part B0
  int row = 0;
  int col = 0;  // row <= col
  double value = 0.0;
};

// One affine PSD block B0 + sum_i y_i B_i, stored sparse by upper triangle
// with entries grouped by y index.
struct SdpBlock {
  std::string label;
  int side = 0;
  std::vector<BlockEntry> b0;
  std::vector<int> y_offsets;        // size y_dim + 1
  std::vector<BlockEntry> y_entries; // sorted by (y, row, col), merged

  void finalize(int y_dim, std::vector<BlockEntry> entries);
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
  // y indices with at least one entry in this block.
  std::vector<int> active_variables() const;
};

struct SdpProblem {
  int n_vars_poly = 0;
  int order = 0;
  int y_dim = 0;
  double objective_constant = 0.0;
  Eigen::VectorXd objective;  // linear functional on y
  std::vector<SdpBlock> blocks;

  double objective_at(const Eigen::VectorXd& y) const {
    return objective_constant + objective.dot(y);
  }
};

// Moment matrix M_r(y): side |b_r|, entry (alpha, beta) reads y_{alpha+beta},
// entry (0,0) the constant one.
SdpBlock moment_matrix_structure(const MomentIndexMap& map, int order,
                                 const std::string& label = "moment");

// Scalar localizing matrix M_{r-ceil(deg g/2)}(g y).
SdpBlock localizing_scalar(const poly::Polynomial& g, const MomentIndexMap& map,
                           const std::string& label);

// Matrix localizing block M_{r-ceil(d/2)}(G y), monomial-major layout: the
// block is |b_s| x |b_s| tiles of size m, tile (alpha, beta) holding
// sum_gamma G_gamma y_{alpha+beta+gamma}.
SdpBlock localizing_pmi(const poly::MatrixPolynomial& G, const MomentIndexMap& map,
                        const std::string& label);

struct Objective {
  double constant = 0.0;
  Eigen::VectorXd linear;  // over the scaled variables a_s
};

// Assembles the order-r relaxation: one moment matrix, one box localizer
// 1 - a_{s,g}^2 per variable, one PMI localizer per compliance block.
SdpProblem build_relaxation(const Objective& objective,
                            const std::vector<poly::MatrixPolynomial>& compliance_blocks,
                            int n_vars, int order);

// Moment vector of the Dirac measure at a point (test and recovery helper).
Eigen::VectorXd moments_of_point(const MomentIndexMap& map, const Eigen::VectorXd& x);

// Dense moment matrix M_k(y) for rank diagnostics, k <= r.
Eigen::MatrixXd moment_matrix_values(const MomentIndexMap& map, int k,
                                     const Eigen::VectorXd& y);

}  // namespace framecert::relax

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

// Multi-index and polynomial algebra over the design variables.  Everything
// here is immutable after construction and safe for concurrent reads.
//
// Monomials are ordered graded-lexicographically: lower total degree first,
// and within one degree the variable x1 dominates (x1^2 precedes x1*x2,
// which precedes x2^2).  This fixed order makes moment-matrix indexing
// deterministic.

namespace framecert::poly {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);
  static MultiIndex zero(int n_vars);
  // Unit multi-index e_i, optionally scaled: x_i^power.
  static MultiIndex unit(int n_vars, int var, int power = 1);

  int n_vars() const { return static_cast<int>(exp_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exp_[static_cast<size_t>(i)]; }
  const std::vector<int>& exponents() const { return exp_; }

  MultiIndex operator+(const MultiIndex& other) const;

  bool operator==(const MultiIndex& other) const { return exp_ == other.exp_; }
  bool operator!=(const MultiIndex& other) const { return !(*this == other); }

 private:
  std::vector<int> exp_;
  int degree_ = 0;
};

// Graded-lex "less than".
bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

struct GradedLexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return graded_lex_less(a, b);
  }
};

struct MultiIndexHash {
  size_t operator()(const MultiIndex& m) const {
    size_t h = 0x9e3779b97f4a7c15ull;
    for (int e : m.exponents()) {
      h ^= static_cast<size_t>(e) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Ordered basis of all monomials of degree <= max_degree in n_vars variables.
// Entry 0 is the constant monomial.
class MonomialBasis {
 public:
  MonomialBasis(int n_vars, int max_degree);

  int n_vars() const { return n_vars_; }
  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const MultiIndex& operator[](int i) const {
    return entries_[static_cast<size_t>(i)];
  }
  const std::vector<MultiIndex>& entries() const { return entries_; }

  // Position of a monomial in the basis, -1 if absent.
  int index_of(const MultiIndex& m) const;

 private:
  int n_vars_;
  int max_degree_;
  std::vector<MultiIndex> entries_;
  std::unordered_map<MultiIndex, int, MultiIndexHash> index_;
};

// binomial(n_vars + k, k), the cardinality of MonomialBasis(n_vars, k).
std::int64_t basis_size(int n_vars, int k);

// Sparse multivariate polynomial with real coefficients.  Zero coefficients
// are never stored; terms produced by arithmetic are pruned at 1e-14.
class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, double, GradedLexLess>;

  explicit Polynomial(int n_vars);
  Polynomial(int n_vars, TermMap terms);
  static Polynomial constant(int n_vars, double value);
  static Polynomial variable(int n_vars, int var);

  int n_vars() const { return n_vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  double coefficient(const MultiIndex& m) const;

  void add_term(const MultiIndex& m, double coeff);

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double scale) const;

  double evaluate(const Eigen::VectorXd& x) const;

  // Expands P(s_1 x'_1 + t_1, ..., s_n x'_n + t_n) in the primed variables.
  Polynomial substitute_affine(const std::vector<std::pair<double, double>>&
                                   scale_shift) const;

 private:
  int n_vars_;
  TermMap terms_;
};

// Symmetric-matrix-valued polynomial; houses stiffness G(x) >= 0 blocks.
class MatrixPolynomial {
 public:
  MatrixPolynomial(int n_vars, int dim);

  int n_vars() const { return n_vars_; }
  int dim() const { return dim_; }
  int degree() const;
  const std::map<MultiIndex, Eigen::MatrixXd, GradedLexLess>& terms() const {
    return terms_;
  }

  // Accumulates coeff into the term for m; enforces symmetry to 1e-12
  // relative and drops terms that cancel to zero.
  void add_term(const MultiIndex& m, const Eigen::MatrixXd& coeff);
  const Eigen::MatrixXd* term(const MultiIndex& m) const;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;

  MatrixPolynomial substitute_affine(
      const std::vector<std::pair<double, double>>& scale_shift) const;

 private:
  int n_vars_;
  int dim_;
  std::map<MultiIndex, Eigen::MatrixXd, GradedLexLess> terms_;
};

}  // namespace framecert::poly

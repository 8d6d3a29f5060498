#include "poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace framecert::poly {

namespace {
constexpr double kPruneTol = 1e-14;
}

MultiIndex::MultiIndex(std::vector<int> exponents) : exp_(std::move(exponents)) {
  for (int e : exp_) {
    if (e < 0) throw std::invalid_argument("multi-index exponent must be >= 0");
    degree_ += e;
  }
}

MultiIndex MultiIndex::zero(int n_vars) {
  return MultiIndex(std::vector<int>(static_cast<size_t>(n_vars), 0));
}

MultiIndex MultiIndex::unit(int n_vars, int var, int power) {
  std::vector<int> e(static_cast<size_t>(n_vars), 0);
  e.at(static_cast<size_t>(var)) = power;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (n_vars() != other.n_vars()) {
    throw std::invalid_argument("multi-index variable count mismatch");
  }
  std::vector<int> e(exp_.size());
  for (size_t i = 0; i < exp_.size(); ++i) e[i] = exp_[i] + other.exp_[i];
  return MultiIndex(std::move(e));
}

bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // Within a degree x1^2 precedes x1*x2, so the larger exponent vector
  // (plain lexicographic) comes first.
  return std::lexicographical_compare(b.exponents().begin(),
                                      b.exponents().end(),
                                      a.exponents().begin(),
                                      a.exponents().end());
}

std::int64_t basis_size(int n_vars, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n_vars + i) / i;
  return r;
}

MonomialBasis::MonomialBasis(int n_vars, int max_degree)
    : n_vars_(n_vars), max_degree_(max_degree) {
  if (n_vars < 1) throw std::invalid_argument("basis needs n_vars >= 1");
  if (max_degree < 0) throw std::invalid_argument("basis needs degree >= 0");
  entries_.reserve(static_cast<size_t>(basis_size(n_vars, max_degree)));
  std::vector<int> e(static_cast<size_t>(n_vars), 0);
  // Enumerate compositions of each degree directly in graded-lex order.
  for (int deg = 0; deg <= max_degree; ++deg) {
    e.assign(static_cast<size_t>(n_vars), 0);
    e[0] = deg;
    while (true) {
      entries_.emplace_back(e);
      // Next composition: move one unit from the rightmost positive entry
      // that is not the last, standard colex successor.
      int i = n_vars - 2;
      while (i >= 0 && e[static_cast<size_t>(i)] == 0) --i;
      if (i < 0) break;
      int tail = e[static_cast<size_t>(n_vars - 1)];
      e[static_cast<size_t>(i)] -= 1;
      e[static_cast<size_t>(i + 1)] = tail + 1;
      if (i + 1 != n_vars - 1) e[static_cast<size_t>(n_vars - 1)] = 0;
      if (deg == 0) break;
    }
  }
  index_.reserve(entries_.size() * 2);
  for (int i = 0; i < size(); ++i) index_.emplace(entries_[static_cast<size_t>(i)], i);
}

int MonomialBasis::index_of(const MultiIndex& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? -1 : it->second;
}

Polynomial::Polynomial(int n_vars) : n_vars_(n_vars) {}

Polynomial::Polynomial(int n_vars, TermMap terms)
    : n_vars_(n_vars), terms_(std::move(terms)) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->first.n_vars() != n_vars_) {
      throw std::invalid_argument("polynomial term variable count mismatch");
    }
    it = it->second == 0.0 ? terms_.erase(it) : std::next(it);
  }
}

Polynomial Polynomial::constant(int n_vars, double value) {
  Polynomial p(n_vars);
  p.add_term(MultiIndex::zero(n_vars), value);
  return p;
}

Polynomial Polynomial::variable(int n_vars, int var) {
  Polynomial p(n_vars);
  p.add_term(MultiIndex::unit(n_vars, var), 1.0);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::coefficient(const MultiIndex& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const MultiIndex& m, double coeff) {
  if (m.n_vars() != n_vars_) {
    throw std::invalid_argument("polynomial term variable count mismatch");
  }
  auto [it, inserted] = terms_.emplace(m, coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) <= kPruneTol) terms_.erase(it);
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (n_vars_ != other.n_vars_) {
    throw std::invalid_argument("polynomial variable count mismatch");
  }
  Polynomial r = *this;
  for (const auto& [m, c] : other.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  return *this + other * -1.0;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (n_vars_ != other.n_vars_) {
    throw std::invalid_argument("polynomial variable count mismatch");
  }
  Polynomial r(n_vars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) {
      r.add_term(ma + mb, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::operator*(double scale) const {
  Polynomial r(n_vars_);
  for (const auto& [m, c] : terms_) r.add_term(m, c * scale);
  return r;
}

double Polynomial::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != n_vars_) {
    throw std::invalid_argument("evaluation point dimension mismatch");
  }
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double mono = c;
    for (int i = 0; i < n_vars_; ++i) {
      for (int k = 0; k < m[i]; ++k) mono *= x[i];
    }
    sum += mono;
  }
  return sum;
}

namespace {

// Expansion of one monomial under x_i = s_i x'_i + t_i: the list of
// (multi-index, weight) pairs it generates.
void expand_monomial(const MultiIndex& m,
                     const std::vector<std::pair<double, double>>& maps,
                     std::vector<std::pair<MultiIndex, double>>& out) {
  const int n = m.n_vars();
  out.clear();
  out.emplace_back(MultiIndex::zero(n), 1.0);
  std::vector<std::pair<MultiIndex, double>> next;
  for (int v = 0; v < n; ++v) {
    const int p = m[v];
    if (p == 0) continue;
    const auto [s, t] = maps[static_cast<size_t>(v)];
    // (s x' + t)^p expanded with binomial coefficients.
    std::vector<std::pair<int, double>> pow;  // (exponent of x'_v, coeff)
    double binom = 1.0;
    for (int j = 0; j <= p; ++j) {
      pow.emplace_back(j, binom * std::pow(s, j) * std::pow(t, p - j));
      binom = binom * (p - j) / (j + 1);
    }
    next.clear();
    for (const auto& [base, w] : out) {
      for (const auto& [j, pw] : pow) {
        if (pw == 0.0 && j != p) continue;
        next.emplace_back(base + MultiIndex::unit(n, v, j), w * pw);
      }
    }
    out.swap(next);
  }
}

}  // namespace

Polynomial Polynomial::substitute_affine(
    const std::vector<std::pair<double, double>>& scale_shift) const {
  if (static_cast<int>(scale_shift.size()) != n_vars_) {
    throw std::invalid_argument("substitution must map every variable");
  }
  Polynomial r(n_vars_);
  std::vector<std::pair<MultiIndex, double>> expansion;
  for (const auto& [m, c] : terms_) {
    expand_monomial(m, scale_shift, expansion);
    for (const auto& [mi, w] : expansion) r.add_term(mi, c * w);
  }
  return r;
}

MatrixPolynomial::MatrixPolynomial(int n_vars, int dim)
    : n_vars_(n_vars), dim_(dim) {}

int MatrixPolynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

void MatrixPolynomial::add_term(const MultiIndex& m, const Eigen::MatrixXd& coeff) {
  if (m.n_vars() != n_vars_) {
    throw std::invalid_argument("matrix polynomial term variable count mismatch");
  }
  if (coeff.rows() != dim_ || coeff.cols() != dim_) {
    throw std::invalid_argument("matrix polynomial coefficient dimension mismatch");
  }
  const double scale = std::max(1.0, coeff.cwiseAbs().maxCoeff());
  if ((coeff - coeff.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("matrix polynomial coefficient must be symmetric");
  }
  auto [it, inserted] = terms_.emplace(m, coeff);
  if (!inserted) it->second += coeff;
  if (it->second.cwiseAbs().maxCoeff() <= kPruneTol) terms_.erase(it);
}

const Eigen::MatrixXd* MatrixPolynomial::term(const MultiIndex& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? nullptr : &it->second;
}

Eigen::MatrixXd MatrixPolynomial::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != n_vars_) {
    throw std::invalid_argument("evaluation point dimension mismatch");
  }
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const auto& [m, c] : terms_) {
    double mono = 1.0;
    for (int i = 0; i < n_vars_; ++i) {
      for (int k = 0; k < m[i]; ++k) mono *= x[i];
    }
    sum += mono * c;
  }
  return sum;
}

MatrixPolynomial MatrixPolynomial::substitute_affine(
    const std::vector<std::pair<double, double>>& scale_shift) const {
  if (static_cast<int>(scale_shift.size()) != n_vars_) {
    throw std::invalid_argument("substitution must map every variable");
  }
  MatrixPolynomial r(n_vars_, dim_);
  std::vector<std::pair<MultiIndex, double>> expansion;
  for (const auto& [m, c] : terms_) {
    expand_monomial(m, scale_shift, expansion);
    for (const auto& [mi, w] : expansion) {
      if (w != 0.0) r.add_term(mi, w * c);
    }
  }
  return r;
}

}  // namespace framecert::poly

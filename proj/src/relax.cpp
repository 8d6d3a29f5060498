#include "relax.hpp"

#include <algorithm>
#include <stdexcept>

namespace framecert::relax {

MomentIndexMap::MomentIndexMap(int n_vars, int order)
    : order_(order), basis_(n_vars, 2 * order) {
  if (order < 1) throw std::invalid_argument("relaxation order must be >= 1");
}

int MomentIndexMap::y_index(const poly::MultiIndex& m) const {
  const int idx = basis_.index_of(m);
  if (idx < 0) {
    throw std::invalid_argument("monomial of degree " + std::to_string(m.degree()) +
                                " exceeds the truncation 2r = " +
                                std::to_string(2 * order_));
  }
  if (idx == 0) throw std::invalid_argument("the constant moment is pinned to one");
  return idx - 1;
}

const poly::MultiIndex& MomentIndexMap::monomial(int y_index) const {
  return basis_[y_index + 1];
}

void SdpBlock::finalize(int y_dim, std::vector<BlockEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const BlockEntry& a, const BlockEntry& b) {
    if (a.y != b.y) return a.y < b.y;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });
  // Merge duplicates.
  std::vector<BlockEntry> merged;
  merged.reserve(entries.size());
  for (const BlockEntry& e : entries) {
    if (!merged.empty() && merged.back().y == e.y && merged.back().row == e.row &&
        merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const BlockEntry& e) { return e.value == 0.0; });

  b0.clear();
  y_entries.clear();
  for (const BlockEntry& e : merged) {
    (e.y < 0 ? b0 : y_entries).push_back(e);
  }
  y_offsets.assign(static_cast<size_t>(y_dim) + 1, 0);
  for (const BlockEntry& e : y_entries) y_offsets[static_cast<size_t>(e.y) + 1]++;
  for (size_t i = 1; i < y_offsets.size(); ++i) y_offsets[i] += y_offsets[i - 1];
}

Eigen::MatrixXd SdpBlock::evaluate(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(side, side);
  auto put = [&m](const BlockEntry& e, double scale) {
    m(e.row, e.col) += scale * e.value;
    if (e.row != e.col) m(e.col, e.row) += scale * e.value;
  };
  for (const BlockEntry& e : b0) put(e, 1.0);
  for (const BlockEntry& e : y_entries) put(e, y[e.y]);
  return m;
}

std::vector<int> SdpBlock::active_variables() const {
  std::vector<int> act;
  for (size_t y = 0; y + 1 < y_offsets.size(); ++y) {
    if (y_offsets[y + 1] > y_offsets[y]) act.push_back(static_cast<int>(y));
  }
  return act;
}

namespace {

void push_monomial_entry(std::vector<BlockEntry>& entries, const MomentIndexMap& map,
                         const poly::MultiIndex& m, int row, int col, double value) {
  BlockEntry e;
  e.y = m.degree() == 0 ? -1 : map.y_index(m);
  e.row = row;
  e.col = col;
  e.value = value;
  entries.push_back(e);
}

}  // namespace

SdpBlock moment_matrix_structure(const MomentIndexMap& map, int order,
                                 const std::string& label) {
  if (order < 1 || order > map.order()) {
    throw std::invalid_argument("moment matrix order out of range");
  }
  const poly::MonomialBasis rows(map.n_vars(), order);
  SdpBlock block;
  block.label = label;
  block.side = rows.size();
  std::vector<BlockEntry> entries;
  entries.reserve(static_cast<size_t>(rows.size()) * (rows.size() + 1) / 2);
  for (int a = 0; a < rows.size(); ++a) {
    for (int b = a; b < rows.size(); ++b) {
      push_monomial_entry(entries, map, rows[a] + rows[b], a, b, 1.0);
    }
  }
  block.finalize(map.y_dim(), std::move(entries));
  return block;
}

SdpBlock localizing_scalar(const poly::Polynomial& g, const MomentIndexMap& map,
                           const std::string& label) {
  const int d = g.degree();
  const int s = map.order() - (d + 1) / 2;
  if (s < 0) {
    throw std::invalid_argument("constraint degree " + std::to_string(d) +
                                " exceeds the relaxation order");
  }
  const poly::MonomialBasis rows(map.n_vars(), s);
  SdpBlock block;
  block.label = label;
  block.side = rows.size();
  std::vector<BlockEntry> entries;
  for (int a = 0; a < rows.size(); ++a) {
    for (int b = a; b < rows.size(); ++b) {
      const poly::MultiIndex ab = rows[a] + rows[b];
      for (const auto& [gamma, coeff] : g.terms()) {
        push_monomial_entry(entries, map, ab + gamma, a, b, coeff);
      }
    }
  }
  block.finalize(map.y_dim(), std::move(entries));
  return block;
}

SdpBlock localizing_pmi(const poly::MatrixPolynomial& G, const MomentIndexMap& map,
                        const std::string& label) {
  const int d = G.degree();
  const int s = map.order() - (d + 1) / 2;
  if (s < 0) {
    throw std::invalid_argument("constraint degree " + std::to_string(d) +
                                " exceeds the relaxation order");
  }
  const poly::MonomialBasis rows(map.n_vars(), s);
  const int m = G.dim();
  SdpBlock block;
  block.label = label;
  block.side = rows.size() * m;

  // Sparse upper-triangle view of each coefficient matrix.
  struct Triple {
    int i, j;
    double v;
  };
  std::vector<std::pair<poly::MultiIndex, std::vector<Triple>>> coeffs;
  for (const auto& [gamma, mat] : G.terms()) {
    std::vector<Triple> t;
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        if (mat(i, j) != 0.0) t.push_back({i, j, mat(i, j)});
      }
    }
    coeffs.emplace_back(gamma, std::move(t));
  }

  std::vector<BlockEntry> entries;
  for (int a = 0; a < rows.size(); ++a) {
    for (int b = a; b < rows.size(); ++b) {
      const poly::MultiIndex ab = rows[a] + rows[b];
      for (const auto& [gamma, tiles] : coeffs) {
        const poly::MultiIndex mono = ab + gamma;
        const int y = mono.degree() == 0 ? -1 : map.y_index(mono);
        for (const Triple& t : tiles) {
          // Tile (a, b) carries G(i, j); below-diagonal positions of an
          // off-diagonal tile mirror the symmetric coefficient.
          BlockEntry e;
          e.y = y;
          e.row = a * m + t.i;
          e.col = b * m + t.j;
          e.value = t.v;
          entries.push_back(e);
          if (a != b && t.i != t.j) {
            BlockEntry e2;
            e2.y = y;
            e2.row = a * m + t.j;
            e2.col = b * m + t.i;
            e2.value = t.v;
            entries.push_back(e2);
          }
        }
      }
    }
  }
  block.finalize(map.y_dim(), std::move(entries));
  return block;
}

SdpProblem build_relaxation(const Objective& objective,
                            const std::vector<poly::MatrixPolynomial>& compliance_blocks,
                            int n_vars, int order) {
  int max_degree = 2;
  for (const auto& G : compliance_blocks) max_degree = std::max(max_degree, G.degree());
  if (order < (max_degree + 1) / 2) {
    throw std::invalid_argument("relaxation order " + std::to_string(order) +
                                " too small for stiffness degree " +
                                std::to_string(max_degree));
  }
  const MomentIndexMap map(n_vars, order);

  SdpProblem problem;
  problem.n_vars_poly = n_vars;
  problem.order = order;
  problem.y_dim = map.y_dim();
  problem.objective_constant = objective.constant;
  problem.objective = Eigen::VectorXd::Zero(map.y_dim());
  for (int g = 0; g < n_vars; ++g) {
    problem.objective[map.y_index(poly::MultiIndex::unit(n_vars, g))] =
        objective.linear[g];
  }

  problem.blocks.push_back(moment_matrix_structure(map, order));
  for (int g = 0; g < n_vars; ++g) {
    poly::Polynomial box(n_vars);
    box.add_term(poly::MultiIndex::zero(n_vars), 1.0);
    box.add_term(poly::MultiIndex::unit(n_vars, g, 2), -1.0);
    problem.blocks.push_back(localizing_scalar(box, map, "box[" + std::to_string(g) + "]"));
  }
  for (size_t j = 0; j < compliance_blocks.size(); ++j) {
    problem.blocks.push_back(
        localizing_pmi(compliance_blocks[j], map, "compliance[" + std::to_string(j) + "]"));
  }
  return problem;
}

Eigen::VectorXd moments_of_point(const MomentIndexMap& map, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(map.y_dim());
  for (int k = 0; k < map.y_dim(); ++k) {
    const poly::MultiIndex& m = map.monomial(k);
    double v = 1.0;
    for (int i = 0; i < map.n_vars(); ++i) {
      for (int p = 0; p < m[i]; ++p) v *= x[i];
    }
    y[k] = v;
  }
  return y;
}

Eigen::MatrixXd moment_matrix_values(const MomentIndexMap& map, int k,
                                     const Eigen::VectorXd& y) {
  const poly::MonomialBasis rows(map.n_vars(), k);
  Eigen::MatrixXd M(rows.size(), rows.size());
  for (int a = 0; a < rows.size(); ++a) {
    for (int b = a; b < rows.size(); ++b) {
      const poly::MultiIndex m = rows[a] + rows[b];
      const double v = m.degree() == 0 ? 1.0 : y[map.y_index(m)];
      M(a, b) = v;
      M(b, a) = v;
    }
  }
  return M;
}

}  // namespace framecert::relax

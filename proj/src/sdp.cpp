#include "sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace framecert::sdp {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::optimal_loosened: return "optimal (loosened tolerance)";
    case SolveStatus::max_iterations: return "maximum iterations reached";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numerical_failure: return "numerical failure";
  }
  return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Per-block constraint data in compressed form.
struct BlockData {
  int side = 0;
  const relax::SdpBlock* spec = nullptr;
  std::vector<int> active;                 // y indices present in this block
  std::vector<std::vector<int>> rows_of;   // per active idx: sorted support rows
  MatrixXd b0;

  MatrixXd assemble(const VectorXd& y) const { return spec->evaluate(y); }
};

struct BlockWork {
  MatrixXd X, Y;              // current iterates
  MatrixXd Rp;                // X - (B0 + sum y_i B_i), sign per derivation
  MatrixXd Lx, Ly;            // Cholesky factors
  MatrixXd G, Ginv, Winv;     // NT scaling
  VectorXd sigma;             // NT spectrum: V = diag(sigma)
  MatrixXd Z;                 // W^{-1} RHS W^{-1} scratch
  MatrixXd dX, dY;            // current direction
  MatrixXd dXa, dYa;          // predictor direction
};

double sym_min_eig(const MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Largest step alpha with S + alpha dS staying PSD, given chol(S) = L L'.
double max_step(const MatrixXd& L, const MatrixXd& dS) {
  const MatrixXd Li = L.triangularView<Eigen::Lower>().solve(
      MatrixXd::Identity(L.rows(), L.cols()));
  const MatrixXd N = Li * dS * Li.transpose();
  const double lmin = sym_min_eig(0.5 * (N + N.transpose()));
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

// sum_i dy_i B_i for one block, dense.
MatrixXd accumulate_direction(const BlockData& blk, const VectorXd& dy) {
  MatrixXd S = MatrixXd::Zero(blk.side, blk.side);
  const auto& off = blk.spec->y_offsets;
  for (int idx : blk.active) {
    const double w = dy[idx];
    if (w == 0.0) continue;
    for (int e = off[static_cast<size_t>(idx)]; e < off[static_cast<size_t>(idx) + 1]; ++e) {
      const auto& en = blk.spec->y_entries[static_cast<size_t>(e)];
      S(en.row, en.col) += w * en.value;
      if (en.row != en.col) S(en.col, en.row) += w * en.value;
    }
  }
  return S;
}

// <B_i, T> for the sparse constraint i restricted to one block.
double sparse_inner(const BlockData& blk, int idx, const MatrixXd& T) {
  const auto& off = blk.spec->y_offsets;
  double sum = 0.0;
  for (int e = off[static_cast<size_t>(idx)]; e < off[static_cast<size_t>(idx) + 1]; ++e) {
    const auto& en = blk.spec->y_entries[static_cast<size_t>(e)];
    sum += en.value * (en.row == en.col ? T(en.row, en.col) : 2.0 * T(en.row, en.col));
  }
  return sum;
}

class InteriorPointSolver {
 public:
  InteriorPointSolver(const relax::SdpProblem& problem, const SolveOptions& opt)
      : problem_(problem), opt_(opt), m_(problem.y_dim) {
    for (const auto& b : problem.blocks) {
      BlockData d;
      d.side = b.side;
      d.spec = &b;
      d.active = b.active_variables();
      d.rows_of.resize(d.active.size());
      for (size_t k = 0; k < d.active.size(); ++k) {
        const int idx = d.active[k];
        std::vector<int>& rows = d.rows_of[k];
        for (int e = b.y_offsets[static_cast<size_t>(idx)];
             e < b.y_offsets[static_cast<size_t>(idx) + 1]; ++e) {
          rows.push_back(b.y_entries[static_cast<size_t>(e)].row);
          rows.push_back(b.y_entries[static_cast<size_t>(e)].col);
        }
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      }
      d.b0 = MatrixXd::Zero(b.side, b.side);
      for (const auto& e : b.b0) {
        d.b0(e.row, e.col) = e.value;
        d.b0(e.col, e.row) = e.value;
      }
      blocks_.push_back(std::move(d));
    }
    // Map from active list to position, per block, for the Schur loop.
    n_threads_ = opt.threads > 0
                     ? opt.threads
                     : std::max(1u, std::thread::hardware_concurrency());
  }

  SdpSolution run() {
    SdpSolution sol;
    init_point();

    MatrixXd M(m_, m_);
    Eigen::LDLT<MatrixXd> mfact;
    VectorXd y_best;
    double best_gap = std::numeric_limits<double>::infinity();
    int stall_count = 0;

    for (int iter = 0; iter < opt_.max_iterations; ++iter) {
      // Residuals and convergence bookkeeping.
      double pinf = 0.0;
      for (size_t k = 0; k < blocks_.size(); ++k) {
        work_[k].Rp = work_[k].X - blocks_[k].assemble(y_);
        pinf = std::max(pinf, work_[k].Rp.cwiseAbs().maxCoeff() /
                                  (1.0 + blocks_[k].b0.cwiseAbs().maxCoeff()));
      }
      VectorXd rd = problem_.objective;
      for (size_t k = 0; k < blocks_.size(); ++k) {
        for (int idx : blocks_[k].active) {
          rd[idx] -= sparse_inner(blocks_[k], idx, work_[k].Y);
        }
      }
      const double dinf =
          rd.cwiseAbs().maxCoeff() / (1.0 + problem_.objective.cwiseAbs().maxCoeff());

      const double pobj = problem_.objective.dot(y_);
      double dobj = 0.0;
      double mu = 0.0;
      int dim_total = 0;
      for (size_t k = 0; k < blocks_.size(); ++k) {
        dobj -= (blocks_[k].b0.array() * work_[k].Y.array()).sum();
        mu += (work_[k].X.array() * work_[k].Y.array()).sum();
        dim_total += blocks_[k].side;
      }
      mu /= dim_total;
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

      IterationRecord rec;
      rec.iteration = iter;
      rec.primal_objective = pobj + problem_.objective_constant;
      rec.dual_objective = dobj + problem_.objective_constant;
      rec.gap = gap;
      rec.primal_residual = pinf;
      rec.dual_residual = dinf;
      rec.mu = mu;
      sol.log.push_back(rec);
      if (opt_.verbose) {
        std::fprintf(stderr,
                     "iter %3d  pobj % .9e  dobj % .9e  gap %.2e  pinf %.2e  "
                     "dinf %.2e  mu %.2e\n",
                     iter, rec.primal_objective, rec.dual_objective, gap, pinf,
                     dinf, mu);
      }

      const double err = std::max({gap, pinf, dinf});
      if (err < best_gap * 0.9) {
        best_gap = err;
        stall_count = 0;
      } else {
        ++stall_count;
      }
      if (gap <= opt_.tol && pinf <= opt_.tol && dinf <= opt_.tol) {
        return finish(sol, SolveStatus::optimal, gap, pinf, dinf, iter);
      }
      if (stall_count >= 8) {
        if (gap <= opt_.loosened_tol && pinf <= opt_.loosened_tol &&
            dinf <= opt_.loosened_tol) {
          sol.tolerance_loosened = true;
          sol.message = "converged at loosened tolerance (near-degenerate instance)";
          return finish(sol, SolveStatus::optimal_loosened, gap, pinf, dinf, iter);
        }
        sol.message = "progress stalled before reaching the tolerance";
        return finish(sol, SolveStatus::numerical_failure, gap, pinf, dinf, iter);
      }
      if (std::abs(dobj) > 1e12 * (1.0 + std::abs(pobj)) && dinf <= 1e-6) {
        sol.message = "dual objective diverges: problem deemed infeasible";
        return finish(sol, SolveStatus::infeasible, gap, pinf, dinf, iter);
      }

      // NT scaling per block.
      bool factor_ok = true;
      for (size_t k = 0; k < blocks_.size(); ++k) {
        if (!compute_scaling(work_[k])) {
          factor_ok = false;
          break;
        }
      }
      if (!factor_ok) {
        sol.message = "iterate lost positive definiteness";
        return finish(sol, SolveStatus::numerical_failure, gap, pinf, dinf, iter);
      }

      build_schur(M);
      mfact.compute(M);
      if (mfact.info() != Eigen::Success) {
        sol.message = "Schur complement factorization failed";
        return finish(sol, SolveStatus::numerical_failure, gap, pinf, dinf, iter);
      }

      // Predictor: affine scaling direction (sigma = 0).
      VectorXd rhs(m_);
      predictor_rhs(rd, rhs);
      VectorXd dy = mfact.solve(rhs);
      form_directions(dy, /*predictor=*/true);

      double ap = 1.0, ad = 1.0;
      step_lengths(/*predictor=*/true, ap, ad);
      double mu_aff = 0.0;
      for (size_t k = 0; k < blocks_.size(); ++k) {
        mu_aff += ((work_[k].X + ap * work_[k].dXa).array() *
                   (work_[k].Y + ad * work_[k].dYa).array())
                      .sum();
      }
      mu_aff /= dim_total;
      double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
      sigma = std::clamp(sigma, 1e-8, 1.0);

      // Corrector.
      corrector_rhs(rd, sigma * mu, rhs);
      dy = mfact.solve(rhs);
      form_directions(dy, /*predictor=*/false);
      step_lengths(/*predictor=*/false, ap, ad);
      ap = std::min(1.0, opt_.step_fraction * ap);
      ad = std::min(1.0, opt_.step_fraction * ad);

      // Apply, backing off if numerics break positive definiteness.
      bool applied = false;
      for (int tries = 0; tries < 6 && !applied; ++tries) {
        applied = try_apply(dy, ap, ad);
        if (!applied) {
          ap *= 0.5;
          ad *= 0.5;
        }
      }
      if (!applied) {
        sol.message = "step rejected repeatedly";
        return finish(sol, SolveStatus::numerical_failure, gap, pinf, dinf, iter);
      }
      if (std::max(ap, ad) < 1e-6) ++stall_count;
    }
    sol.message = "iteration limit reached";
    const auto& last = sol.log.back();
    return finish(sol, SolveStatus::max_iterations, last.gap, last.primal_residual,
                  last.dual_residual, opt_.max_iterations);
  }

 private:
  void init_point() {
    y_ = VectorXd::Zero(m_);
    work_.resize(blocks_.size());
    for (size_t k = 0; k < blocks_.size(); ++k) {
      double scale = 1.0 + blocks_[k].b0.cwiseAbs().maxCoeff();
      for (const auto& e : blocks_[k].spec->y_entries) {
        scale = std::max(scale, std::abs(e.value));
      }
      const double xi =
          10.0 * std::max(std::sqrt(static_cast<double>(blocks_[k].side)), scale);
      work_[k].X = xi * MatrixXd::Identity(blocks_[k].side, blocks_[k].side);
      work_[k].Y = xi * MatrixXd::Identity(blocks_[k].side, blocks_[k].side);
    }
  }

  bool compute_scaling(BlockWork& w) {
    Eigen::LLT<MatrixXd> lx(w.X);
    Eigen::LLT<MatrixXd> ly(w.Y);
    if (lx.info() != Eigen::Success || ly.info() != Eigen::Success) return false;
    w.Lx = lx.matrixL();
    w.Ly = ly.matrixL();
    // NT scaling point W = G G' with G = Lx V S^{-1/2} from the SVD
    // Ly' Lx = U S V'; then G^{-1} X G^{-T} = G' Y G = diag(S).
    Eigen::BDCSVD<MatrixXd> svd(w.Ly.transpose() * w.Lx,
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
    w.sigma = svd.singularValues();
    if (w.sigma.minCoeff() <= 0.0) return false;
    const VectorXd shalf = w.sigma.cwiseSqrt();
    w.G = w.Lx * svd.matrixV() * shalf.cwiseInverse().asDiagonal();
    const MatrixXd lxinv = w.Lx.triangularView<Eigen::Lower>().solve(
        MatrixXd::Identity(w.Lx.rows(), w.Lx.cols()));
    w.Ginv = shalf.asDiagonal() * svd.matrixV().transpose() * lxinv;
    w.Winv = w.Ginv.transpose() * w.Ginv;
    return true;
  }

  // Schur matrix M_ij = sum_k <B_i, W^{-1} B_j W^{-1}>, rows distributed
  // across threads; every entry is written by exactly one thread, so the
  // result does not depend on the thread count.
  void build_schur(MatrixXd& M) {
    M.setZero();
    for (size_t k = 0; k < blocks_.size(); ++k) {
      const BlockData& blk = blocks_[k];
      const BlockWork& w = work_[k];
      const int nact = static_cast<int>(blk.active.size());
      auto row_task = [&](int start, int stride) {
        MatrixXd T(blk.side, blk.side);
        MatrixXd C;       // compressed F_i
        MatrixXd WinvR;   // Winv columns on the support
        for (int p = start; p < nact; p += stride) {
          const int i = blk.active[static_cast<size_t>(p)];
          const std::vector<int>& rows = blk.rows_of[static_cast<size_t>(p)];
          const int r = static_cast<int>(rows.size());
          C.setZero(r, r);
          const auto& off = blk.spec->y_offsets;
          auto pos = [&rows](int gl) {
            return static_cast<int>(std::lower_bound(rows.begin(), rows.end(), gl) -
                                    rows.begin());
          };
          for (int e = off[static_cast<size_t>(i)]; e < off[static_cast<size_t>(i) + 1]; ++e) {
            const auto& en = blk.spec->y_entries[static_cast<size_t>(e)];
            const int a = pos(en.row);
            const int b = pos(en.col);
            C(a, b) += en.value;
            if (a != b) C(b, a) += en.value;
          }
          WinvR.resize(blk.side, r);
          for (int c = 0; c < r; ++c) WinvR.col(c) = w.Winv.col(rows[static_cast<size_t>(c)]);
          T.noalias() = WinvR * (C * WinvR.transpose());
          for (int q = p; q < nact; ++q) {
            const int j = blk.active[static_cast<size_t>(q)];
            M(i, j) += sparse_inner(blk, j, T);
          }
        }
      };
      if (n_threads_ <= 1 || nact < 64) {
        row_task(0, 1);
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads_; ++t) {
          pool.emplace_back(row_task, t, n_threads_);
        }
        for (auto& th : pool) th.join();
      }
      // Mirror the within-block upper contributions: entries (i, j) were
      // accumulated for active order p <= q only.
    }
    M = M.selfadjointView<Eigen::Upper>();
  }

  // rhs_i = sum_k <B_i, W^{-1} RHS_k W^{-1}> - rd_i with the predictor
  // RHS_k = Rp_k - X_k (the affine target G E G' collapses to -X).
  void predictor_rhs(const VectorXd& rd, VectorXd& rhs) {
    rhs = -rd;
    for (size_t k = 0; k < blocks_.size(); ++k) {
      BlockWork& w = work_[k];
      const MatrixXd R = w.Rp - w.X;
      w.Z.noalias() = w.Winv * R * w.Winv;
      for (int idx : blocks_[k].active) {
        rhs[idx] += sparse_inner(blocks_[k], idx, w.Z);
      }
    }
  }

  // Corrector RHS_k = Rp_k + G (E) G' with
  // E = L_S^{-1}(sigma mu I - S^2 - H(Dxa Dya)).
  void corrector_rhs(const VectorXd& rd, double sigma_mu, VectorXd& rhs) {
    rhs = -rd;
    for (size_t k = 0; k < blocks_.size(); ++k) {
      BlockWork& w = work_[k];
      const MatrixXd Dxa = w.Ginv * w.dXa * w.Ginv.transpose();
      const MatrixXd Dya = w.G.transpose() * w.dYa * w.G;
      MatrixXd H = Dxa * Dya;
      H = 0.5 * (H + H.transpose());
      MatrixXd E(w.sigma.size(), w.sigma.size());
      for (int p = 0; p < w.sigma.size(); ++p) {
        for (int q = 0; q < w.sigma.size(); ++q) {
          double target = -H(p, q);
          if (p == q) target += sigma_mu - w.sigma[p] * w.sigma[p];
          E(p, q) = 2.0 * target / (w.sigma[p] + w.sigma[q]);
        }
      }
      const MatrixXd R = w.Rp + w.G * E * w.G.transpose();
      w.Z.noalias() = w.Winv * R * w.Winv;
      for (int idx : blocks_[k].active) {
        rhs[idx] += sparse_inner(blocks_[k], idx, w.Z);
      }
    }
  }

  // dX = sum_i dy_i B_i - Rp;  dY = W^{-1}(RHS - sum_i dy_i B_i) W^{-1}
  //    = Z - W^{-1} (sum dy_i B_i) W^{-1}.
  void form_directions(const VectorXd& dy, bool predictor) {
    for (size_t k = 0; k < blocks_.size(); ++k) {
      BlockWork& w = work_[k];
      const MatrixXd S = accumulate_direction(blocks_[k], dy);
      MatrixXd dX = S - w.Rp;
      MatrixXd dY = w.Z - w.Winv * S * w.Winv;
      dY = 0.5 * (dY + dY.transpose());
      if (predictor) {
        w.dXa = dX;
        w.dYa = dY;
      }
      w.dX = std::move(dX);
      w.dY = std::move(dY);
    }
  }

  void step_lengths(bool, double& ap, double& ad) {
    ap = std::numeric_limits<double>::infinity();
    ad = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < blocks_.size(); ++k) {
      ap = std::min(ap, max_step(work_[k].Lx, work_[k].dX));
      ad = std::min(ad, max_step(work_[k].Ly, work_[k].dY));
    }
    ap = std::min(ap, 1e6);
    ad = std::min(ad, 1e6);
  }

  bool try_apply(const VectorXd& dy, double ap, double ad) {
    std::vector<MatrixXd> Xn(blocks_.size()), Yn(blocks_.size());
    for (size_t k = 0; k < blocks_.size(); ++k) {
      Xn[k] = work_[k].X + ap * work_[k].dX;
      Yn[k] = work_[k].Y + ad * work_[k].dY;
      if (Eigen::LLT<MatrixXd>(Xn[k]).info() != Eigen::Success) return false;
      if (Eigen::LLT<MatrixXd>(Yn[k]).info() != Eigen::Success) return false;
    }
    y_ += ap * dy;
    for (size_t k = 0; k < blocks_.size(); ++k) {
      work_[k].X = std::move(Xn[k]);
      work_[k].Y = std::move(Yn[k]);
    }
    return true;
  }

  SdpSolution finish(SdpSolution& sol, SolveStatus status, double gap, double pinf,
                     double dinf, int iter) {
    sol.status = status;
    sol.y = y_;
    sol.objective_linear = problem_.objective.dot(y_);
    sol.objective = sol.objective_linear + problem_.objective_constant;
    sol.duality_gap = gap;
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    sol.iterations = iter;
    sol.slack.clear();
    sol.dual.clear();
    for (size_t k = 0; k < blocks_.size(); ++k) {
      sol.slack.push_back(blocks_[k].assemble(y_));
      sol.dual.push_back(work_[k].Y);
    }
    return sol;
  }

  const relax::SdpProblem& problem_;
  SolveOptions opt_;
  int m_ = 0;
  int n_threads_ = 1;
  std::vector<BlockData> blocks_;
  std::vector<BlockWork> work_;
  VectorXd y_;
};

}  // namespace

SdpSolution solve(const relax::SdpProblem& problem, const SolveOptions& options) {
  if (problem.y_dim <= 0 || problem.blocks.empty()) {
    throw std::invalid_argument("SDP problem is empty");
  }
  InteriorPointSolver solver(problem, options);
  return solver.run();
}

VerifyReport verify(const relax::SdpProblem& problem, const Eigen::VectorXd& y) {
  VerifyReport report;
  report.objective = problem.objective_at(y);
  for (const auto& b : problem.blocks) {
    VerifyBlock vb;
    vb.label = b.label;
    const Eigen::MatrixXd S = b.evaluate(y);
    vb.block_scale = 1.0 + S.cwiseAbs().maxCoeff();
    vb.min_eigenvalue = sym_min_eig(S);
    report.worst_violation = std::max(report.worst_violation,
                                      -vb.min_eigenvalue / vb.block_scale);
    report.blocks.push_back(std::move(vb));
  }
  return report;
}

VerifyReport verify(const relax::SdpProblem& problem, const SdpSolution& solution) {
  VerifyReport report = verify(problem, solution.y);
  if (solution.dual.size() == problem.blocks.size()) {
    for (size_t k = 0; k < problem.blocks.size(); ++k) {
      const Eigen::MatrixXd S = problem.blocks[k].evaluate(solution.y);
      report.blocks[k].complementarity =
          (S.array() * solution.dual[k].array()).sum();
    }
  }
  return report;
}

namespace {

void format_value(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string sdpa_text(const relax::SdpProblem& problem) {
  std::string out;
  out += std::to_string(problem.y_dim);
  out += "\n";
  out += std::to_string(problem.blocks.size());
  out += "\n";
  for (size_t k = 0; k < problem.blocks.size(); ++k) {
    if (k) out += " ";
    out += std::to_string(problem.blocks[k].side);
  }
  out += "\n";
  for (int i = 0; i < problem.y_dim; ++i) {
    if (i) out += " ";
    format_value(out, problem.objective[i]);
  }
  out += "\n";
  // Entries: "matno blockno i j value", 1-based upper triangle; matno 0
  // holds F0 = -B0 per the SDPA sign convention X = sum y_i F_i - F0.
  for (size_t k = 0; k < problem.blocks.size(); ++k) {
    for (const auto& e : problem.blocks[k].b0) {
      out += "0 " + std::to_string(k + 1) + " " + std::to_string(e.row + 1) + " " +
             std::to_string(e.col + 1) + " ";
      format_value(out, -e.value);
      out += "\n";
    }
  }
  for (int i = 0; i < problem.y_dim; ++i) {
    for (size_t k = 0; k < problem.blocks.size(); ++k) {
      const auto& blk = problem.blocks[k];
      for (int e = blk.y_offsets[static_cast<size_t>(i)];
           e < blk.y_offsets[static_cast<size_t>(i) + 1]; ++e) {
        const auto& en = blk.y_entries[static_cast<size_t>(e)];
        out += std::to_string(i + 1) + " " + std::to_string(k + 1) + " " +
               std::to_string(en.row + 1) + " " + std::to_string(en.col + 1) + " ";
        format_value(out, en.value);
        out += "\n";
      }
    }
  }
  return out;
}

void export_sdpa(const relax::SdpProblem& problem, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << sdpa_text(problem);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

namespace {

struct SdpaParser {
  std::istringstream in;
  int line_no = 0;
  std::string line;

  explicit SdpaParser(const std::string& text) : in(text) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("SDPA parse error at line " + std::to_string(line_no) +
                             ": " + msg);
  }

  bool next_data_line() {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const char c = line[0];
      if (c == '"' || c == '*') continue;  // comment
      return true;
    }
    return false;
  }

  std::vector<double> numbers() const {
    std::string clean = line;
    for (char& c : clean) {
      if (c == ',' || c == '(' || c == ')' || c == '{' || c == '}') c = ' ';
    }
    std::istringstream ls(clean);
    std::vector<double> out;
    double v;
    while (ls >> v) out.push_back(v);
    return out;
  }
};

}  // namespace

relax::SdpProblem import_sdpa_text(const std::string& text) {
  SdpaParser p(text);
  if (!p.next_data_line()) p.fail("missing variable count");
  const auto mline = p.numbers();
  if (mline.empty()) p.fail("missing variable count");
  const int m = static_cast<int>(mline[0]);
  if (m <= 0) p.fail("variable count must be positive");

  if (!p.next_data_line()) p.fail("missing block count");
  const auto bline = p.numbers();
  if (bline.empty()) p.fail("missing block count");
  const int nblocks = static_cast<int>(bline[0]);
  if (nblocks <= 0) p.fail("block count must be positive");

  if (!p.next_data_line()) p.fail("missing block sizes");
  auto sizes = p.numbers();
  if (static_cast<int>(sizes.size()) != nblocks) p.fail("block size list length mismatch");

  if (!p.next_data_line()) p.fail("missing objective vector");
  auto cvec = p.numbers();
  if (static_cast<int>(cvec.size()) != m) p.fail("objective vector length mismatch");

  relax::SdpProblem problem;
  problem.y_dim = m;
  problem.objective = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) problem.objective[i] = cvec[static_cast<size_t>(i)];

  std::vector<std::vector<relax::BlockEntry>> entries(static_cast<size_t>(nblocks));
  std::vector<int> side(static_cast<size_t>(nblocks));
  std::vector<bool> diagonal(static_cast<size_t>(nblocks));
  for (int k = 0; k < nblocks; ++k) {
    const double s = sizes[static_cast<size_t>(k)];
    // A negative size declares a diagonal block of that many entries.
    side[static_cast<size_t>(k)] = static_cast<int>(std::abs(s));
    diagonal[static_cast<size_t>(k)] = s < 0;
  }

  while (p.next_data_line()) {
    const auto v = p.numbers();
    if (v.size() != 5) p.fail("expected 'matno blockno i j value'");
    const int matno = static_cast<int>(v[0]);
    const int blockno = static_cast<int>(v[1]) - 1;
    const int row = static_cast<int>(v[2]) - 1;
    const int col = static_cast<int>(v[3]) - 1;
    const double value = v[4];
    if (matno < 0 || matno > m) p.fail("matrix number out of range");
    if (blockno < 0 || blockno >= nblocks) p.fail("block number out of range");
    if (row < 0 || col < 0 || row >= side[static_cast<size_t>(blockno)] ||
        col >= side[static_cast<size_t>(blockno)]) {
      p.fail("entry indices out of range");
    }
    if (diagonal[static_cast<size_t>(blockno)] && row != col) {
      p.fail("off-diagonal entry in a diagonal block");
    }
    relax::BlockEntry e;
    e.y = matno - 1;  // matno 0 becomes the constant part
    e.row = std::min(row, col);
    e.col = std::max(row, col);
    // F0 carries -B0.
    e.value = matno == 0 ? -value : value;
    entries[static_cast<size_t>(blockno)].push_back(e);
  }

  for (int k = 0; k < nblocks; ++k) {
    relax::SdpBlock blk;
    blk.label = "block" + std::to_string(k + 1);
    blk.side = side[static_cast<size_t>(k)];
    blk.finalize(m, std::move(entries[static_cast<size_t>(k)]));
    problem.blocks.push_back(std::move(blk));
  }
  return problem;
}

relax::SdpProblem import_sdpa(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return import_sdpa_text(buf.str());
}

}  // namespace framecert::sdp

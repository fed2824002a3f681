#include "maxqap/simplex.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace maxqap::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Raised when the post-perturbation repair pass cannot finish; the caller
// retries the whole solve without perturbation.
struct CleanupFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Working state for one solve. Columns 0..nstruct-1 are the structural
// variables, nstruct..nstruct+m-1 the slacks. The basis inverse is kept in
// product form: an LU factorization of a reference basis plus a chain of
// rank-1 eta updates, rebuilt every refactor_every pivots or whenever
// numbers look suspect; reduced costs are updated incrementally from the
// pivot row and recomputed exactly at every refactorization.
//
// The models built here are heavily degenerate (most right-hand sides are
// zero), which drives the design choices that matter: devex pricing, which
// avoids the long zigzag walks plain most-negative pricing takes on such
// models; a ratio test that prefers the largest pivot among tied rows; and,
// for large models, a right-hand-side perturbation, distinct offsets well
// above roundoff, that puts the polytope in general position so pivots make
// strict progress instead of milling around degenerate faces. The
// perturbation only lives inside the iteration: once the run is optimal the
// true right-hand side comes back, and a dual simplex pass walks the basis,
// still dual feasible because reduced costs do not depend on the right-hand
// side, back to primal feasibility. The result is a true optimum of the
// unperturbed problem. Bland's rule takes over permanently if the objective
// ever stalls for a long stretch, restoring the termination guarantee.
class Solver {
 public:
  Solver(const SimplexProblem& prob, double tol, long max_iter, bool allow_perturb)
      : tol_(tol), max_iter_(max_iter) {
    m_ = static_cast<int>(prob.rows.size());
    nstruct_ = prob.num_vars;
    ncols_ = nstruct_ + m_;

    cols_.resize(ncols_);
    cost_.assign(ncols_, 0.0);
    ub_.assign(ncols_, kInf);
    for (int j = 0; j < nstruct_; ++j) {
      cost_[j] = prob.objective[j];
      ub_[j] = prob.upper[j];
      if (!(ub_[j] >= 0.0)) throw std::invalid_argument("simplex: negative upper bound");
    }
    rhs_ = Eigen::VectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i) {
      const auto& row = prob.rows[i];
      if (row.rhs < 0.0) throw std::invalid_argument("simplex: negative right-hand side");
      rhs_[i] = row.rhs;
      for (const auto& [j, a] : row.terms) {
        if (j < 0 || j >= nstruct_) throw std::invalid_argument("simplex: column out of range");
        if (a != 0.0) cols_[j].push_back({i, a});
      }
      cols_[nstruct_ + i].push_back({i, 1.0});  // slack
    }

    // Large models iterate against a slightly perturbed right-hand side:
    // distinct offsets, comfortably above roundoff, leave no degenerate
    // vertices to stall on. Small models stay exact; they terminate fine
    // without help.
    rhs_run_ = rhs_;
    if (allow_perturb && m_ >= 600) {
      perturbed_ = true;
      for (int i = 0; i < m_; ++i)
        rhs_run_[i] += 1e-6 * (1.0 + static_cast<double>(i) / m_);
    }

    basis_.resize(m_);
    row_of_.assign(ncols_, -1);
    at_ub_.assign(ncols_, 0);
    for (int i = 0; i < m_; ++i) {
      basis_[i] = nstruct_ + i;
      row_of_[nstruct_ + i] = i;
    }
    xb_ = rhs_run_;  // slack basis: feasible start at the origin
    d_.assign(ncols_, 0.0);
    gamma_.assign(ncols_, 1.0);
    rejected_.assign(ncols_, 0);
    recompute_reduced_costs();
  }

  SimplexResult run() {
    long iter = 0;
    int stall = 0;
    bool bland = false;
    const bool debug = std::getenv("SIMPLEX_DEBUG") != nullptr;
    Eigen::VectorXd w(m_), rho(m_), a(m_);
    std::vector<double> alpha(ncols_, 0.0);

    double last_exact_obj = -kInf;
    while (true) {
      if (++iter > max_iter_) throw std::runtime_error("simplex: iteration limit exceeded");
      if (static_cast<int>(etas_.size()) >= refactor_every_) {
        std::vector<double> d_old;
        if (debug) d_old = d_;
        refactor();
        recompute_reduced_costs();
        if (debug) {
          double drift = 0.0;
          for (int j = 0; j < ncols_; ++j)
            if (row_of_[j] < 0) drift = std::max(drift, std::abs(d_old[j] - d_[j]));
          double obj = 0.0;
          for (int i = 0; i < m_; ++i) obj += cost_[basis_[i]] * xb_[i];
          for (int j = 0; j < ncols_; ++j)
            if (row_of_[j] < 0 && at_ub_[j]) obj += cost_[j] * ub_[j];
          if (drift > 1e-6)
            std::fprintf(stderr, "[simplex] iter=%ld d-drift %.3e\n", iter, drift);
          if (obj < last_exact_obj - 1e-9)
            std::fprintf(stderr, "[simplex] iter=%ld obj DECREASED %.9f -> %.9f\n", iter,
                         last_exact_obj, obj);
          last_exact_obj = obj;
        }
      }
      if (debug && iter % 500 == 0) {
        double obj = 0.0;
        for (int i = 0; i < m_; ++i) obj += cost_[basis_[i]] * xb_[i];
        for (int j = 0; j < ncols_; ++j)
          if (row_of_[j] < 0 && at_ub_[j]) obj += cost_[j] * ub_[j];
        std::fprintf(stderr, "[simplex] iter=%ld obj=%.6f refactors=%ld bland=%d\n", iter, obj,
                     refactors_, bland ? 1 : 0);
      }

      int enter = price(bland);
      if (enter < 0) {
        // Certify optimality against exact reduced costs from a fresh
        // factorization; the incremental ones may have drifted.
        if (etas_.empty() && factored_) break;
        refactor();
        recompute_reduced_costs();
        enter = price(bland);
        if (enter < 0) break;
      }
      const double d = d_[enter];

      a.setZero();
      for (const auto& [i, c] : cols_[enter]) a[i] = c;
      ftran(a, w);
      if (!w.allFinite()) {
        if (debug) std::fprintf(stderr, "[simplex] iter=%ld nonfinite direction\n", iter);
        refactor();
        recompute_reduced_costs();
        continue;
      }
      const double sigma = at_ub_[enter] ? -1.0 : 1.0;

      // Harris two-pass ratio test. The first pass finds the most limiting
      // step with every bound relaxed by a small slack, so rows nearly
      // parallel to the direction cannot force a microscopic pivot; the
      // second picks the largest pivot among rows blocking within that step
      // (Bland mode: the smallest basis index, as anti-cycling requires).
      // Bounds may be overshot by up to the slack; the cleanup pass at the
      // end takes the overshoot back out.
      const double delta = 1e-9;
      double t_lim = ub_[enter];
      for (int i = 0; i < m_; ++i) {
        const double s = sigma * w[i];
        if (s > 1e-9)
          t_lim = std::min(t_lim, (std::max(xb_[i], 0.0) + delta) / s);
        else if (s < -1e-9 && ub_[basis_[i]] < kInf)
          t_lim = std::min(t_lim, (std::max(ub_[basis_[i]] - xb_[i], 0.0) + delta) / (-s));
      }

      if (t_lim >= ub_[enter] - 1e-12) {
        // The entering variable reaches its opposite bound first: flip it
        // with no basis change.
        if (ub_[enter] == kInf) throw std::runtime_error("simplex: unbounded");
        const double t = ub_[enter];
        xb_ -= (sigma * t) * w;
        at_ub_[enter] ^= 1;
        if (std::abs(d) * t > 1e-12)
          stall = 0;
        else if (!bland && ++stall > (perturbed_ ? 2000 : 300))
          bland = true;
        continue;
      }

      int r = -1;
      bool leave_at_ub = false;
      double t_r = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double s = sigma * w[i];
        double t;
        bool hits_ub;
        if (s > 1e-9) {
          t = std::max(xb_[i], 0.0) / s;
          hits_ub = false;
        } else if (s < -1e-9 && ub_[basis_[i]] < kInf) {
          t = std::max(ub_[basis_[i]] - xb_[i], 0.0) / (-s);
          hits_ub = true;
        } else {
          continue;
        }
        if (t > t_lim) continue;
        const bool better =
            r < 0 || (bland ? basis_[i] < basis_[r] : std::abs(w[i]) > std::abs(w[r]));
        if (better) {
          r = i;
          leave_at_ub = hits_ub;
          t_r = t;
        }
      }

      if (r < 0 || std::abs(w[r]) < 1e-6) {
        // No tolerable pivot in this column. Retry once on clean numbers;
        // if the column genuinely offers nothing better, shelve it until
        // the next refactorization rather than wreck the eta chain with a
        // huge multiplier.
        if (!etas_.empty()) {
          refactor();
          recompute_reduced_costs();
        } else {
          if (debug)
            std::fprintf(stderr, "[simplex] iter=%ld rejecting column %d (pivot %.3e)\n", iter,
                         enter, r < 0 ? 0.0 : w[r]);
          rejected_[enter] = 1;
        }
        continue;
      }

      // Pivot row of the tableau (alpha), needed both for the devex weight
      // update and for the incremental reduced-cost update. Must use the
      // pre-pivot basis.
      btran_unit(r, rho);
      const double ar = w[r];
      for (int j = 0; j < ncols_; ++j) {
        if (row_of_[j] >= 0) {
          alpha[j] = 0.0;
          continue;
        }
        double s = 0.0;
        for (const auto& [i, c] : cols_[j]) s += rho[i] * c;
        alpha[j] = s;
      }

      // Commit the pivot.
      const double t = t_r;
      const double enter_from = at_ub_[enter] ? ub_[enter] : 0.0;
      xb_ -= (sigma * t) * w;
      const int leave = basis_[r];
      at_ub_[leave] = leave_at_ub ? 1 : 0;
      row_of_[leave] = -1;
      basis_[r] = enter;
      row_of_[enter] = r;
      at_ub_[enter] = 0;
      xb_[r] = enter_from + sigma * t;
      push_eta(r, w);

      // Devex reference weights: grow weights of columns aligned with the
      // pivot row; restart the framework if they blow up.
      const double gq = gamma_[enter];
      if (gq > 1e8) {
        std::fill(gamma_.begin(), gamma_.end(), 1.0);
      } else {
        const double inv2 = 1.0 / (ar * ar);
        for (int j = 0; j < ncols_; ++j) {
          if (row_of_[j] >= 0 || alpha[j] == 0.0) continue;
          gamma_[j] = std::max(gamma_[j], alpha[j] * alpha[j] * inv2 * gq);
        }
        gamma_[leave] = std::max(gq * inv2, 1.0);
      }

      // Reduced costs move by a multiple of the pivot row.
      const double ratio_d = d / ar;
      for (int j = 0; j < ncols_; ++j) {
        if (row_of_[j] >= 0 || alpha[j] == 0.0) continue;
        d_[j] -= ratio_d * alpha[j];
      }
      d_[leave] = -ratio_d;
      d_[enter] = 0.0;

      if (std::abs(d) * t > 1e-12)
        stall = 0;
      else if (!bland && ++stall > (perturbed_ ? 2000 : 300))
        bland = true;
    }

    // Drop the perturbation. The basis stays dual feasible under a
    // right-hand-side change, so a short dual pass repairs whatever primal
    // feasibility the shift (and the ratio-test slack) took with it,
    // landing on a true optimum.
    use_true_rhs_ = true;
    refactor();
    recompute_reduced_costs();
    dual_cleanup();
    refactor();

    SimplexResult res;
    res.iterations = iter;
    res.values.assign(nstruct_, 0.0);
    for (int j = 0; j < nstruct_; ++j) {
      double v;
      if (row_of_[j] >= 0)
        v = xb_[row_of_[j]];
      else
        v = at_ub_[j] ? ub_[j] : 0.0;
      res.values[j] = std::clamp(v, 0.0, ub_[j]);
    }
    res.objective = 0.0;
    for (int j = 0; j < nstruct_; ++j) res.objective += cost_[j] * res.values[j];
    return res;
  }

 private:
  struct Eta {
    int r;
    double wr;
    std::vector<std::pair<int, double>> terms;  // off-pivot entries of w
  };

  // x := B^-1 v. The reference factorization first, then the eta chain in
  // the order the pivots happened.
  void ftran(const Eigen::VectorXd& v, Eigen::VectorXd& x) const {
    x = factored_ ? lu_.solve(v).eval() : v;
    for (const auto& e : etas_) {
      const double piv = x[e.r] / e.wr;
      if (piv != 0.0)
        for (const auto& [i, wi] : e.terms) x[i] -= wi * piv;
      x[e.r] = piv;
    }
  }

  // z := B^-T v: eta transposes newest-first, then the transposed LU.
  void btran(Eigen::VectorXd& z, Eigen::VectorXd& out) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = z[it->r];
      for (const auto& [i, wi] : it->terms) acc -= wi * z[i];
      z[it->r] = acc / it->wr;
    }
    out = factored_ ? lut_.solve(z).eval() : z;
  }

  void btran_unit(int r, Eigen::VectorXd& out) const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m_);
    z[r] = 1.0;
    btran(z, out);
  }

  void recompute_reduced_costs() {
    Eigen::VectorXd z(m_), lambda(m_);
    for (int i = 0; i < m_; ++i) z[i] = cost_[basis_[i]];
    btran(z, lambda);
    for (int j = 0; j < ncols_; ++j) {
      if (row_of_[j] >= 0) {
        d_[j] = 0.0;
        continue;
      }
      double d = cost_[j];
      for (const auto& [i, c] : cols_[j]) d -= lambda[i] * c;
      d_[j] = d;
    }
  }

  // Devex pricing: maximize d^2 / weight among eligible columns. Bland mode
  // returns the lowest eligible index instead.
  int price(bool bland) const {
    int enter = -1;
    double best = 0.0;
    for (int j = 0; j < ncols_; ++j) {
      if (row_of_[j] >= 0 || rejected_[j]) continue;
      const double d = d_[j];
      const bool ok = at_ub_[j] ? (d < -tol_) : (d > tol_);
      if (!ok) continue;
      if (bland) return j;
      const double score = d * d / gamma_[j];
      if (score > best) {
        best = score;
        enter = j;
      }
    }
    return enter;
  }

  void push_eta(int r, const Eigen::VectorXd& w) {
    Eta e;
    e.r = r;
    e.wr = w[r];
    for (int i = 0; i < m_; ++i)
      if (i != r && std::abs(w[i]) > 1e-13) e.terms.push_back({i, w[i]});
    etas_.push_back(std::move(e));
  }

  // Right-hand side with nonbasic at-upper-bound columns shifted out.
  Eigen::VectorXd effective_rhs() const {
    Eigen::VectorXd rhs = use_true_rhs_ ? rhs_ : rhs_run_;
    for (int j = 0; j < ncols_; ++j) {
      if (row_of_[j] >= 0 || !at_ub_[j]) continue;
      for (const auto& [i, c] : cols_[j]) rhs[i] -= c * ub_[j];
    }
    return rhs;
  }

  // Basis columns are a handful of nonzeros each, so the reference
  // factorization is sparse and cheap enough to rebuild often, which keeps
  // the eta chain short and the numbers tight. SparseLU has no transposed
  // solve, so the transpose is factorized alongside for btran.
  void refactor() {
    std::vector<Eigen::Triplet<double>> tb, tbt;
    for (int i = 0; i < m_; ++i)
      for (const auto& [r, c] : cols_[basis_[i]]) {
        tb.emplace_back(r, i, c);
        tbt.emplace_back(i, r, c);
      }
    Eigen::SparseMatrix<double> B(m_, m_), BT(m_, m_);
    B.setFromTriplets(tb.begin(), tb.end());
    BT.setFromTriplets(tbt.begin(), tbt.end());
    lu_.compute(B);
    lut_.compute(BT);
    if (lu_.info() != Eigen::Success || lut_.info() != Eigen::Success)
      throw std::runtime_error("simplex: singular basis");
    factored_ = true;
    etas_.clear();
    std::fill(rejected_.begin(), rejected_.end(), 0);
    ++refactors_;
    xb_ = lu_.solve(effective_rhs());
    if (!xb_.allFinite()) throw std::runtime_error("simplex: singular basis");
  }

  // Dual simplex pass run after the perturbation is removed: basic
  // variables pushed slightly outside their bounds leave one at a time,
  // with the entering column chosen by the usual smallest-reduced-cost
  // ratio so the basis stays dual feasible throughout.
  void dual_cleanup() {
    const double feas_tol = 1e-10;
    Eigen::VectorXd rho(m_), w(m_), a(m_);
    std::vector<double> alpha(ncols_, 0.0);
    for (long pass = 0; pass < 20000; ++pass) {
      if (static_cast<int>(etas_.size()) >= refactor_every_) {
        refactor();
        recompute_reduced_costs();
      }

      int r = -1;
      bool above = false;
      double worst = feas_tol;
      for (int i = 0; i < m_; ++i) {
        const double ubi = ub_[basis_[i]];
        double v = -xb_[i];
        bool ab = false;
        if (xb_[i] > ubi) {
          v = xb_[i] - ubi;
          ab = true;
        }
        if (v > worst) {
          worst = v;
          r = i;
          above = ab;
        }
      }
      if (r < 0) return;  // primal feasible again, hence optimal

      btran_unit(r, rho);
      const double target = above ? ub_[basis_[r]] : 0.0;
      const double gap = std::abs(xb_[r] - target);

      // Entering column: among those whose movement pushes row r back
      // toward its bound without leaving their own box, the smallest
      // |d|/|alpha| keeps every other reduced cost on its right side.
      int enter = -1;
      double best = kInf, best_mag = 0.0;
      for (int j = 0; j < ncols_; ++j) {
        if (row_of_[j] >= 0) {
          alpha[j] = 0.0;
          continue;
        }
        double s = 0.0;
        for (const auto& [i, c] : cols_[j]) s += rho[i] * c;
        alpha[j] = s;
        if (std::abs(s) < 1e-6) continue;
        const double push = at_ub_[j] ? s : -s;  // d(xb_r)/dt, t >= 0 into the box
        if (above ? (push > -1e-9) : (push < 1e-9)) continue;
        if (gap / std::abs(s) > ub_[j] + 1e-9) continue;  // would overshoot its box
        const double ratio = std::abs(d_[j]) / std::abs(s);
        if (ratio < best - 1e-12 || (ratio < best + 1e-12 && std::abs(s) > best_mag)) {
          best = ratio;
          best_mag = std::abs(s);
          enter = j;
        }
      }
      if (enter < 0) {
        if (!etas_.empty()) {
          refactor();
          recompute_reduced_costs();
          continue;
        }
        throw CleanupFailure("simplex: perturbation cleanup found no pivot");
      }

      a.setZero();
      for (const auto& [i, c] : cols_[enter]) a[i] = c;
      ftran(a, w);
      if (!w.allFinite() || std::abs(w[r]) < 1e-6 ||
          std::abs(w[r] - alpha[enter]) > 1e-6 * (1.0 + std::abs(w[r]))) {
        if (etas_.empty()) throw CleanupFailure("simplex: unstable cleanup pivot");
        refactor();
        recompute_reduced_costs();
        continue;
      }

      const double sigma = at_ub_[enter] ? -1.0 : 1.0;
      const double t = (xb_[r] - target) / (sigma * w[r]);
      const double enter_from = at_ub_[enter] ? ub_[enter] : 0.0;
      xb_ -= (sigma * t) * w;
      const int leave = basis_[r];
      at_ub_[leave] = above ? 1 : 0;
      row_of_[leave] = -1;
      basis_[r] = enter;
      row_of_[enter] = r;
      at_ub_[enter] = 0;
      xb_[r] = enter_from + sigma * t;
      push_eta(r, w);

      const double ratio_d = d_[enter] / w[r];
      for (int j = 0; j < ncols_; ++j) {
        if (row_of_[j] >= 0 || alpha[j] == 0.0) continue;
        d_[j] -= ratio_d * alpha[j];
      }
      d_[leave] = -ratio_d;
      d_[enter] = 0.0;
    }
    throw CleanupFailure("simplex: perturbation cleanup did not converge");
  }

  double tol_;
  long max_iter_;
  long refactors_ = 0;
  int m_ = 0, nstruct_ = 0, ncols_ = 0;
  int refactor_every_ = 100;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> cost_, ub_, d_, gamma_;
  Eigen::VectorXd rhs_, rhs_run_, xb_;
  bool perturbed_ = false;
  bool use_true_rhs_ = false;
  std::vector<int> basis_, row_of_;
  std::vector<char> at_ub_, rejected_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_, lut_;
  bool factored_ = false;  // identity basis needs no factorization
  std::vector<Eta> etas_;
};

}  // namespace

SimplexResult simplex_maximize(const SimplexProblem& prob, double tol, long max_iter) {
  if (static_cast<int>(prob.objective.size()) != prob.num_vars ||
      static_cast<int>(prob.upper.size()) != prob.num_vars)
    throw std::invalid_argument("simplex: objective/upper size mismatch");
  if (prob.rows.empty()) {
    // No rows: each variable goes to whichever bound its cost prefers.
    SimplexResult res;
    res.values.assign(prob.num_vars, 0.0);
    for (int j = 0; j < prob.num_vars; ++j)
      if (prob.objective[j] > 0.0) {
        if (prob.upper[j] == kInf) throw std::runtime_error("simplex: unbounded");
        res.values[j] = prob.upper[j];
      }
    for (int j = 0; j < prob.num_vars; ++j) res.objective += prob.objective[j] * res.values[j];
    return res;
  }
  try {
    return Solver(prob, tol, max_iter, true).run();
  } catch (const CleanupFailure&) {
    // Slow but safe: redo the whole solve on the exact right-hand side.
    return Solver(prob, tol, max_iter, false).run();
  }
}

}  // namespace maxqap::lp

#include "mmot/simplex.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "mmot/errors.hpp"

namespace mmot {

namespace {

constexpr double kReducedCostTol = 1e-10;
constexpr double kPivotTol = 1e-11;
constexpr int kRefactorEvery = 100;

class Simplex {
 public:
  explicit Simplex(const UnitColumnLp& lp)
      : lp_(lp),
        n_(lp.n_rows),
        b_(Eigen::Map<const Eigen::VectorXd>(lp.rhs.data(), lp.n_rows)) {
    basis_.resize(n_);
    in_basis_.assign(lp_.n_cols, 0);
    for (int r = 0; r < n_; ++r) basis_[r] = artificial(r);
    b_inv_ = Eigen::MatrixXd::Identity(n_, n_);
    x_basic_ = b_;
  }

  SimplexSolution run() {
    phase_one_ = true;
    iterate();
    if (phase_objective() > 1e-7)
      throw NumericalError("transport LP reported infeasible; check marginals");
    expel_artificials();

    phase_one_ = false;
    iterate();

    refactorize();
    SimplexSolution sol;
    sol.iterations = iterations_;
    const Eigen::VectorXd y = duals();
    sol.duals.assign(y.data(), y.data() + n_);
    for (int r = 0; r < n_; ++r) {
      if (is_artificial(basis_[r])) continue;
      const double v = x_basic_[r];
      if (v > 0.0) sol.basic.emplace_back(basis_[r], v);
      sol.objective += lp_.cost(basis_[r]) * std::max(v, 0.0);
    }
    std::sort(sol.basic.begin(), sol.basic.end());
    return sol;
  }

 private:
  std::size_t artificial(int r) const { return lp_.n_cols + static_cast<std::size_t>(r); }
  bool is_artificial(std::size_t var) const { return var >= lp_.n_cols; }

  double var_cost(std::size_t var) const {
    if (phase_one_) return is_artificial(var) ? 1.0 : 0.0;
    return is_artificial(var) ? 0.0 : lp_.cost(var);
  }

  double phase_objective() const {
    double s = 0.0;
    for (int r = 0; r < n_; ++r) s += var_cost(basis_[r]) * x_basic_[r];
    return s;
  }

  Eigen::VectorXd duals() const {
    Eigen::VectorXd cb(n_);
    for (int r = 0; r < n_; ++r) cb[r] = var_cost(basis_[r]);
    return b_inv_.transpose() * cb;
  }

  // B^{-1} A_j for a structural column.
  Eigen::VectorXd direction(std::size_t col) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
    lp_.rows_of(col, rows_scratch_);
    for (int r : rows_scratch_) d += b_inv_.col(r);
    return d;
  }

  void refactorize() {
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(n_, n_);
    for (int r = 0; r < n_; ++r) {
      const std::size_t var = basis_[r];
      if (is_artificial(var)) {
        basis_matrix(static_cast<int>(var - lp_.n_cols), r) = 1.0;
      } else {
        lp_.rows_of(var, rows_scratch_);
        for (int row : rows_scratch_) basis_matrix(row, r) = 1.0;
      }
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    b_inv_ = lu.inverse();
    x_basic_ = lu.solve(b_);
    if (!((basis_matrix * x_basic_ - b_).lpNorm<Eigen::Infinity>() < 1e-7))
      throw NumericalError("simplex basis is numerically singular");
  }

  // Bland: lowest-index structural column with negative reduced cost.
  bool find_entering(const Eigen::VectorXd& y, std::size_t& entering) const {
    for (std::size_t j = 0; j < lp_.n_cols; ++j) {
      if (in_basis_[j]) continue;
      lp_.rows_of(j, rows_scratch_);
      double reduced = var_cost(j);
      for (int row : rows_scratch_) reduced -= y[row];
      if (reduced < -kReducedCostTol) {
        entering = j;
        return true;
      }
    }
    return false;
  }

  // Ratio test; ties go to the smallest basic variable index (Bland). Basic
  // artificials sitting at zero get expelled via a zero-length pivot even on
  // a negative element, so they can never rise above zero.
  int find_leaving(const Eigen::VectorXd& d) const {
    double best_ratio = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (int r = 0; r < n_; ++r) {
      double ratio;
      if (d[r] > kPivotTol) {
        ratio = std::max(x_basic_[r], 0.0) / d[r];
      } else if (is_artificial(basis_[r]) && std::abs(d[r]) > kPivotTol &&
                 x_basic_[r] <= 1e-11) {
        ratio = 0.0;
      } else {
        continue;
      }
      if (ratio < best_ratio - 1e-15 ||
          (ratio <= best_ratio + 1e-15 &&
           (leaving < 0 || basis_[r] < basis_[leaving]))) {
        best_ratio = ratio;
        leaving = r;
      }
    }
    return leaving;
  }

  void pivot(std::size_t entering, int leaving, const Eigen::VectorXd& d) {
    const double theta = std::max(x_basic_[leaving], 0.0) / d[leaving];
    x_basic_ -= theta * d;
    x_basic_[leaving] = theta;
    const std::size_t out = basis_[leaving];
    if (!is_artificial(out)) in_basis_[out] = 0;
    basis_[leaving] = entering;
    in_basis_[entering] = 1;
    b_inv_.row(leaving) /= d[leaving];
    for (int r = 0; r < n_; ++r) {
      if (r == leaving) continue;
      const double f = d[r];
      if (f != 0.0) b_inv_.row(r) -= f * b_inv_.row(leaving);
    }
  }

  void iterate() {
    int since_refactor = 0;
    while (true) {
      const Eigen::VectorXd y = duals();
      std::size_t entering = 0;
      if (!find_entering(y, entering)) {
        // confirm optimality against a freshly factorized basis
        refactorize();
        const Eigen::VectorXd y2 = duals();
        if (!find_entering(y2, entering)) return;
      }
      const Eigen::VectorXd d = direction(entering);
      const int leaving = find_leaving(d);
      if (leaving < 0)
        throw NumericalError("transport LP direction unbounded; bad constraint data");
      pivot(entering, leaving, d);
      ++iterations_;
      if (++since_refactor >= kRefactorEvery) {
        refactorize();
        since_refactor = 0;
      }
    }
  }

  // After phase one, swap any zero-level artificial for a structural column
  // with a usable pivot element in its row.
  void expel_artificials() {
    for (int r = 0; r < n_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (std::size_t j = 0; j < lp_.n_cols; ++j) {
        if (in_basis_[j]) continue;
        lp_.rows_of(j, rows_scratch_);
        double dr = 0.0;
        for (int row : rows_scratch_) dr += b_inv_(r, row);
        if (std::abs(dr) > 1e-9) {
          const Eigen::VectorXd d = direction(j);
          pivot(j, r, d);
          ++iterations_;
          break;
        }
      }
    }
  }

  const UnitColumnLp& lp_;
  int n_;
  Eigen::VectorXd b_;
  std::vector<std::size_t> basis_;
  std::vector<std::uint8_t> in_basis_;
  Eigen::MatrixXd b_inv_;
  Eigen::VectorXd x_basic_;
  bool phase_one_ = true;
  int iterations_ = 0;
  mutable std::vector<int> rows_scratch_;
};

}  // namespace

SimplexSolution solve_unit_lp(const UnitColumnLp& lp) {
  if (lp.n_rows <= 0 || lp.n_cols == 0)
    throw ConfigError("empty LP");
  for (double v : lp.rhs)
    if (!(v >= 0.0)) throw ConfigError("LP right-hand side must be nonnegative");
  Simplex s(lp);
  return s.run();
}

}  // namespace mmot

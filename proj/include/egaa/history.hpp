#pragma once

#include <deque>
#include <utility>

#include <Eigen/Core>

namespace egaa {

/// Sliding window over the last depth+1 iterates. Each entry holds the
/// iterate x_i, its residual r_i and the gradient-step point y_{i+1} = x_i + r_i.
/// Storing y explicitly gives the momentum form its lagged points without
/// recomputing gradients.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(int depth_m);

  int depth() const { return depth_; }

  /// Number of pushes minus one; -1 when empty.
  long iteration() const { return iteration_; }

  /// m_k = min(depth, iteration), the number of difference columns available.
  int effective_depth() const {
    return entries_.empty() ? 0 : static_cast<int>(entries_.size()) - 1;
  }

  bool empty() const { return entries_.empty(); }

  /// Appends an entry, evicting the oldest when the window exceeds depth+1.
  void push(const Eigen::VectorXd& x, const Eigen::VectorXd& r, const Eigen::VectorXd& y);

  /// Difference matrices X_k, R_k with columns ordered oldest first. With
  /// fewer than two entries both matrices have zero columns.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> difference_matrices() const;

  /// The lagged gradient-step point y_{k-j+1}, 1 <= j <= m_k. j = 1 is the
  /// most recent stored y before y_{k+1}; j = m_k is the oldest in the window.
  const Eigen::VectorXd& lagged_y(int j) const;

 private:
  struct Entry {
    Eigen::VectorXd x, r, y;
  };

  int depth_;
  long iteration_ = -1;
  std::deque<Entry> entries_;
};

}  // namespace egaa

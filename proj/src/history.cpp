#include "egaa/history.hpp"

#include <stdexcept>
#include <string>

namespace egaa {

HistoryBuffer::HistoryBuffer(int depth_m) : depth_(depth_m) {
  if (depth_m < 1) throw std::invalid_argument("HistoryBuffer: depth must be >= 1");
}

void HistoryBuffer::push(const Eigen::VectorXd& x, const Eigen::VectorXd& r,
                         const Eigen::VectorXd& y) {
  if (x.size() != r.size() || x.size() != y.size())
    throw std::invalid_argument("HistoryBuffer::push: dimension mismatch");
  if (!entries_.empty() && entries_.front().x.size() != x.size())
    throw std::invalid_argument("HistoryBuffer::push: dimension mismatch with window");
  entries_.push_back({x, r, y});
  if (static_cast<int>(entries_.size()) > depth_ + 1) entries_.pop_front();
  ++iteration_;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> HistoryBuffer::difference_matrices() const {
  const int mk = effective_depth();
  const Eigen::Index dim = entries_.empty() ? 0 : entries_.front().x.size();
  Eigen::MatrixXd X(dim, mk), R(dim, mk);
  for (int j = 0; j < mk; ++j) {
    X.col(j) = entries_[j + 1].x - entries_[j].x;
    R.col(j) = entries_[j + 1].r - entries_[j].r;
  }
  return {std::move(X), std::move(R)};
}

const Eigen::VectorXd& HistoryBuffer::lagged_y(int j) const {
  const int mk = effective_depth();
  if (j < 1 || j > mk)
    throw std::out_of_range("HistoryBuffer::lagged_y: j = " + std::to_string(j) +
                            " outside [1, " + std::to_string(mk) + "]");
  return entries_[entries_.size() - 1 - j].y;
}

}  // namespace egaa

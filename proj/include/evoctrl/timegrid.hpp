#pragma once

#include "evoctrl/linops.hpp"

#include <iosfwd>
#include <string>

namespace evoctrl {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform grid on [0, T] with N steps. Stores T and N; dt is derived.
class TimeGrid {
public:
  TimeGrid() = default;
  TimeGrid(double horizon, Index steps);

  double horizon() const { return horizon_; }
  Index steps() const { return steps_; }
  double dt() const { return horizon_ / static_cast<double>(steps_); }
  double node(Index i) const { return horizon_ * static_cast<double>(i) / static_cast<double>(steps_); }
  double midpoint(Index i) const { return horizon_ * (static_cast<double>(i) + 0.5) / static_cast<double>(steps_); }

  friend bool operator==(const TimeGrid &a, const TimeGrid &b) {
    return a.horizon_ == b.horizon_ && a.steps_ == b.steps_;
  }

private:
  double horizon_ = 1.0;
  Index steps_ = 1;
};

/// States at the N+1 grid nodes.
struct NodeTrajectory {
  TimeGrid grid;
  RowMat values; // (N+1) x n

  NodeTrajectory() = default;
  NodeTrajectory(TimeGrid g, Index width);
  NodeTrajectory(TimeGrid g, RowMat v);

  Index width() const { return values.cols(); }
  Vec at(Index i) const { return values.row(i).transpose(); }
  Vec final_value() const { return at(grid.steps()); }
};

/// One sample per interval, read as a piecewise-constant function.
struct IntervalTrajectory {
  TimeGrid grid;
  RowMat values; // N x k

  IntervalTrajectory() = default;
  IntervalTrajectory(TimeGrid g, Index width);
  IntervalTrajectory(TimeGrid g, RowMat v);

  Index width() const { return values.cols(); }
  Vec at(Index i) const { return values.row(i).transpose(); }

  IntervalTrajectory &operator+=(const IntervalTrajectory &o);
  IntervalTrajectory &operator-=(const IntervalTrajectory &o);
  IntervalTrajectory &operator*=(double s);
};

IntervalTrajectory operator+(IntervalTrajectory a, const IntervalTrajectory &b);
IntervalTrajectory operator-(IntervalTrajectory a, const IntervalTrajectory &b);
IntervalTrajectory operator*(double s, IntervalTrajectory a);

/// Time reflection: interval i <- interval N-1-i.
IntervalTrajectory reflect(const IntervalTrajectory &traj);

/// dt * sum_i a_i^T W b_i.
double l2_inner(const IntervalTrajectory &a, const IntervalTrajectory &b, const Dense &W);
double l2_norm(const IntervalTrajectory &a, const Dense &W);

bool reflection_is_isometry_check(const IntervalTrajectory &u, const Dense &W);
bool reflection_is_isometry_check(const IntervalTrajectory &u);

/// CSV with header `t,<name>0,<name>1,...`, 17 significant digits.
void write_csv(std::ostream &os, const NodeTrajectory &traj, const std::string &name);
void write_csv(std::ostream &os, const IntervalTrajectory &traj, const std::string &name);
void write_csv(const std::string &path, const NodeTrajectory &traj, const std::string &name);
void write_csv(const std::string &path, const IntervalTrajectory &traj, const std::string &name);

/// Parses the CSV forms above back; the grid is recovered from the row
/// count and the time column.
NodeTrajectory read_node_csv(std::istream &is);
IntervalTrajectory read_interval_csv(std::istream &is);

} // namespace evoctrl

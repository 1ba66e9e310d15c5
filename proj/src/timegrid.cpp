#include "evoctrl/timegrid.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace evoctrl {

TimeGrid::TimeGrid(double horizon, Index steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw Error("time horizon must be positive");
  if (steps < 1)
    throw Error("time grid needs at least one step");
}

NodeTrajectory::NodeTrajectory(TimeGrid g, Index width)
    : grid(g), values(RowMat::Zero(g.steps() + 1, width)) {}

NodeTrajectory::NodeTrajectory(TimeGrid g, RowMat v) : grid(g), values(std::move(v)) {
  if (values.rows() != grid.steps() + 1)
    throw DimensionError("node trajectory needs N+1 rows");
}

IntervalTrajectory::IntervalTrajectory(TimeGrid g, Index width)
    : grid(g), values(RowMat::Zero(g.steps(), width)) {}

IntervalTrajectory::IntervalTrajectory(TimeGrid g, RowMat v) : grid(g), values(std::move(v)) {
  if (values.rows() != grid.steps())
    throw DimensionError("interval trajectory needs N rows");
}

namespace {

void require_compatible(const IntervalTrajectory &a, const IntervalTrajectory &b) {
  if (!(a.grid == b.grid))
    throw DimensionError("trajectories live on different time grids");
  if (a.width() != b.width())
    throw DimensionError("trajectory widths differ");
}

} // namespace

IntervalTrajectory &IntervalTrajectory::operator+=(const IntervalTrajectory &o) {
  require_compatible(*this, o);
  values += o.values;
  return *this;
}

IntervalTrajectory &IntervalTrajectory::operator-=(const IntervalTrajectory &o) {
  require_compatible(*this, o);
  values -= o.values;
  return *this;
}

IntervalTrajectory &IntervalTrajectory::operator*=(double s) {
  values *= s;
  return *this;
}

IntervalTrajectory operator+(IntervalTrajectory a, const IntervalTrajectory &b) { return a += b; }
IntervalTrajectory operator-(IntervalTrajectory a, const IntervalTrajectory &b) { return a -= b; }
IntervalTrajectory operator*(double s, IntervalTrajectory a) { return a *= s; }

IntervalTrajectory reflect(const IntervalTrajectory &traj) {
  return IntervalTrajectory(traj.grid, traj.values.colwise().reverse());
}

double l2_inner(const IntervalTrajectory &a, const IntervalTrajectory &b, const Dense &W) {
  require_compatible(a, b);
  if (W.rows() != a.width() || W.cols() != a.width())
    throw DimensionError("l2_inner weight has wrong size");
  // sum_i a_i^T W b_i = trace(A W B^T) = sum of (A W) .* B
  const double s = ((a.values * W).array() * b.values.array()).sum();
  return a.grid.dt() * s;
}

double l2_norm(const IntervalTrajectory &a, const Dense &W) {
  return std::sqrt(std::max(0.0, l2_inner(a, a, W)));
}

bool reflection_is_isometry_check(const IntervalTrajectory &u, const Dense &W) {
  const IntervalTrajectory r = reflect(u);
  const double lhs = l2_inner(u, u, W);
  const double rhs = l2_inner(r, r, W);
  const double scale = u.grid.dt() * ((u.values * W).cwiseAbs().array() * u.values.cwiseAbs().array()).sum();
  return std::abs(lhs - rhs) <= 1e-13 * scale;
}

bool reflection_is_isometry_check(const IntervalTrajectory &u) {
  return reflection_is_isometry_check(u, Dense::Identity(u.width(), u.width()));
}

namespace {

void write_rows(std::ostream &os, const RowMat &values, const std::string &name,
                const std::vector<double> &times) {
  os << "t";
  for (Index j = 0; j < values.cols(); ++j)
    os << ',' << name << j;
  os << '\n';
  os << std::setprecision(17);
  for (Index i = 0; i < values.rows(); ++i) {
    os << times[static_cast<std::size_t>(i)];
    for (Index j = 0; j < values.cols(); ++j)
      os << ',' << values(i, j);
    os << '\n';
  }
}

std::ofstream open_out(const std::string &path) {
  std::ofstream os(path);
  if (!os)
    throw Error("cannot open for writing: " + path);
  return os;
}

struct ParsedCsv {
  std::vector<double> t;
  RowMat values;
};

ParsedCsv parse(std::istream &is) {
  std::string line;
  if (!std::getline(is, line))
    throw Error("empty trajectory CSV");
  Index width = 0;
  for (char c : line)
    if (c == ',')
      ++width;
  std::vector<std::vector<double>> rows;
  ParsedCsv out;
  while (std::getline(is, line)) {
    if (line.empty())
      continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ','))
      row.push_back(std::stod(cell));
    if (static_cast<Index>(row.size()) != width + 1)
      throw Error("ragged trajectory CSV row");
    out.t.push_back(row.front());
    rows.emplace_back(row.begin() + 1, row.end());
  }
  out.values.resize(static_cast<Index>(rows.size()), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < width; ++j)
      out.values(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return out;
}

} // namespace

void write_csv(std::ostream &os, const NodeTrajectory &traj, const std::string &name) {
  std::vector<double> t;
  for (Index i = 0; i <= traj.grid.steps(); ++i)
    t.push_back(traj.grid.node(i));
  write_rows(os, traj.values, name, t);
}

void write_csv(std::ostream &os, const IntervalTrajectory &traj, const std::string &name) {
  std::vector<double> t;
  for (Index i = 0; i < traj.grid.steps(); ++i)
    t.push_back(traj.grid.midpoint(i));
  write_rows(os, traj.values, name, t);
}

void write_csv(const std::string &path, const NodeTrajectory &traj, const std::string &name) {
  auto os = open_out(path);
  write_csv(os, traj, name);
}

void write_csv(const std::string &path, const IntervalTrajectory &traj, const std::string &name) {
  auto os = open_out(path);
  write_csv(os, traj, name);
}

NodeTrajectory read_node_csv(std::istream &is) {
  ParsedCsv p = parse(is);
  const Index steps = p.values.rows() - 1;
  if (steps < 1)
    throw Error("node CSV needs at least two rows");
  return NodeTrajectory(TimeGrid(p.t.back(), steps), std::move(p.values));
}

IntervalTrajectory read_interval_csv(std::istream &is) {
  ParsedCsv p = parse(is);
  const Index steps = p.values.rows();
  if (steps < 1)
    throw Error("interval CSV needs at least one row");
  // midpoints: t_{N-1} = T (N - 1/2) / N; pick the nearby double that
  // reproduces the stored times exactly.
  double horizon = p.t.back() * static_cast<double>(steps) / (static_cast<double>(steps) - 0.5);
  const double down = std::nextafter(horizon, 0.0), up = std::nextafter(horizon, 1e300);
  for (double candidate : {horizon, down, up, std::nextafter(down, 0.0), std::nextafter(up, 1e300)}) {
    const TimeGrid g(candidate, steps);
    if (g.midpoint(steps - 1) == p.t.back() && g.midpoint(0) == p.t.front()) {
      horizon = candidate;
      break;
    }
  }
  return IntervalTrajectory(TimeGrid(horizon, steps), std::move(p.values));
}

} // namespace evoctrl

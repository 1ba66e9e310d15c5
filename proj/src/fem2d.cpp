#include "evoctrl/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>

namespace evoctrl {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Sparse from_triplets(Index rows, Index cols, const Triplets &t) {
  Sparse S(rows, cols);
  S.setFromTriplets(t.begin(), t.end());
  S.makeCompressed();
  return S;
}

double segment_distance(const std::array<double, 2> &p, const std::array<double, 2> &a,
                        const std::array<double, 2> &b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0.0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(p[0] - (a[0] + s * dx), p[1] - (a[1] + s * dy));
}

} // namespace

double MeshL::triangle_area(Index t) const {
  const auto &tri = triangles[static_cast<std::size_t>(t)];
  const auto &a = vertices[tri[0]], &b = vertices[tri[1]], &c = vertices[tri[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

MeshL build_lshape_mesh(Index n) {
  if (n < 1)
    throw Error("mesh resolution must be positive");
  MeshL mesh;
  mesh.n = n;
  const Index side = 2 * n + 1;
  std::vector<Index> id(static_cast<std::size_t>(side * side), -1);
  auto at = [&](Index i, Index j) -> Index & { return id[static_cast<std::size_t>(j * side + i)]; };
  const double h = 1.0 / static_cast<double>(n);
  for (Index j = 0; j < side; ++j)
    for (Index i = 0; i < side; ++i)
      if (i <= n || j <= n) {
        at(i, j) = static_cast<Index>(mesh.vertices.size());
        mesh.vertices.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h});
      }

  std::map<std::pair<Index, Index>, int> edge_count;
  auto add_edge = [&](Index a, Index b) { ++edge_count[{std::min(a, b), std::max(a, b)}]; };
  for (Index j = 0; j < 2 * n; ++j)
    for (Index i = 0; i < 2 * n; ++i) {
      if (i >= n && j >= n)
        continue;
      const Index v00 = at(i, j), v10 = at(i + 1, j), v11 = at(i + 1, j + 1), v01 = at(i, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  for (const auto &t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      add_edge(t[k], t[(k + 1) % 3]);

  // Gamma1: y = 2 (top of the tall square) and x = 2 (right of the wide one).
  const double two = 2.0;
  mesh.on_gamma0.assign(mesh.vertices.size(), false);
  for (const auto &[e, count] : edge_count) {
    if (count != 1)
      continue;
    const auto &a = mesh.vertices[e.first], &b = mesh.vertices[e.second];
    const bool top = a[1] == two && b[1] == two;
    const bool right = a[0] == two && b[0] == two;
    if (top || right) {
      mesh.gamma1_edges.push_back({e.first, e.second});
    } else {
      mesh.gamma0_edges.push_back({e.first, e.second});
      mesh.on_gamma0[e.first] = true;
      mesh.on_gamma0[e.second] = true;
    }
  }
  return mesh;
}

Vec distance_to_gamma0(const MeshL &mesh) {
  Vec dist(static_cast<Index>(mesh.vertices.size()));
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto &e : mesh.gamma0_edges)
      best = std::min(best, segment_distance(mesh.vertices[v], mesh.vertices[e[0]],
                                             mesh.vertices[e[1]]));
    dist(static_cast<Index>(v)) = mesh.on_gamma0[v] ? 0.0 : best;
  }
  return dist;
}

void write_mesh_csv(const std::string &dir, const MeshL &mesh) {
  std::filesystem::create_directories(dir);
  std::vector<bool> on_g1(mesh.vertices.size(), false);
  for (const auto &e : mesh.gamma1_edges)
    on_g1[e[0]] = on_g1[e[1]] = true;
  {
    std::ofstream os(dir + "/vertices.csv");
    if (!os)
      throw Error("cannot write " + dir + "/vertices.csv");
    os << "id,x,y,gamma0,gamma1\n" << std::setprecision(17);
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
      os << v << ',' << mesh.vertices[v][0] << ',' << mesh.vertices[v][1] << ','
         << int(mesh.on_gamma0[v]) << ',' << int(on_g1[v]) << '\n';
  }
  std::ofstream os(dir + "/triangles.csv");
  os << "id,v0,v1,v2\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    os << t << ',' << mesh.triangles[t][0] << ',' << mesh.triangles[t][1] << ','
       << mesh.triangles[t][2] << '\n';
}

double WaveModel::kinetic_energy(const Vec &x) const {
  const Vec p = x.head(np());
  return 0.5 / params.rho * p.dot(Mp * p);
}

Vec WaveModel::to_vertices(const Vec &pdofs) const {
  Vec out = Vec::Zero(static_cast<Index>(mesh.vertices.size()));
  for (Index k = 0; k < np(); ++k)
    out(p_vertex[static_cast<std::size_t>(k)]) = pdofs(k);
  return out;
}

Vec WaveModel::to_pdofs(const Vec &vertex_values) const {
  Vec out(np());
  for (Index k = 0; k < np(); ++k)
    out(k) = vertex_values(p_vertex[static_cast<std::size_t>(k)]);
  return out;
}

WaveModel assemble_wave(const MeshL &mesh, const WaveParams &params) {
  if (!(params.rho > 0.0) || !(params.T_mod > 0.0))
    throw Error("rho and T must be positive");
  if (mesh.gamma1_edges.empty())
    throw Error("mesh has no Gamma1 edges");

  WaveModel w;
  w.mesh = mesh;
  w.params = params;
  const Index nv = static_cast<Index>(mesh.vertices.size());
  w.vertex_p.assign(static_cast<std::size_t>(nv), -1);
  for (Index v = 0; v < nv; ++v)
    if (!mesh.on_gamma0[static_cast<std::size_t>(v)]) {
      w.vertex_p[static_cast<std::size_t>(v)] = w.np();
      w.p_vertex.push_back(v);
    }
  const Index np = w.np(), nq = 2 * nv;

  Triplets mp, mq, md, g;
  for (Index t = 0; t < static_cast<Index>(mesh.triangles.size()); ++t) {
    const auto &tri = mesh.triangles[static_cast<std::size_t>(t)];
    const auto &a = mesh.vertices[tri[0]], &b = mesh.vertices[tri[1]], &c = mesh.vertices[tri[2]];
    const double area = mesh.triangle_area(t);
    if (!(area > 0.0))
      throw Error("triangle " + std::to_string(t) + " is not positively oriented");
    const double dval = params.d((a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0);
    if (!(dval >= 0.0))
      throw Error("damping must be nonnegative");
    // grad phi_k = (y_{k+1} - y_{k+2}, x_{k+2} - x_{k+1}) / (2 area)
    const std::array<std::array<double, 2>, 3> xy = {a, b, c};
    std::array<std::array<double, 2>, 3> grad;
    for (int k = 0; k < 3; ++k) {
      const auto &p1 = xy[(k + 1) % 3], &p2 = xy[(k + 2) % 3];
      grad[k] = {(p1[1] - p2[1]) / (2.0 * area), (p2[0] - p1[0]) / (2.0 * area)};
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double mij = area * (i == j ? 2.0 : 1.0) / 12.0;
        const Index vi = tri[i], vj = tri[j];
        for (int k = 0; k < 2; ++k) {
          mq.emplace_back(2 * vi + k, 2 * vj + k, mij);
          // int d_k phi_j psi_i over the triangle: psi_i integrates to area/3
          const Index pj = w.vertex_p[static_cast<std::size_t>(vj)];
          if (pj >= 0)
            g.emplace_back(2 * vi + k, pj, grad[j][k] * area / 3.0);
        }
        const Index pi = w.vertex_p[static_cast<std::size_t>(vi)];
        const Index pj = w.vertex_p[static_cast<std::size_t>(vj)];
        if (pi >= 0 && pj >= 0) {
          mp.emplace_back(pi, pj, mij);
          if (dval > 0.0)
            md.emplace_back(pi, pj, dval * mij);
        }
      }
  }
  w.Mp = from_triplets(np, np, mp);
  w.Mq = from_triplets(nq, nq, mq);
  w.Md = from_triplets(np, np, md);
  w.G = from_triplets(nq, np, g);

  // Control nodes: top edge left to right, then right edge bottom to top.
  const Index n = mesh.n;
  const double h = mesh.h();
  auto find_vertex = [&](double x, double y) {
    for (Index v = 0; v < nv; ++v) {
      const auto &p = mesh.vertices[static_cast<std::size_t>(v)];
      if (std::abs(p[0] - x) < 0.25 * h && std::abs(p[1] - y) < 0.25 * h)
        return v;
    }
    throw Error("control vertex not found");
  };
  for (Index i = 0; i <= n; ++i)
    w.control_vertex.push_back(find_vertex(static_cast<double>(i) * h, 2.0));
  for (Index j = 0; j <= n; ++j)
    w.control_vertex.push_back(find_vertex(2.0, static_cast<double>(j) * h));
  const Index m = w.m();
  std::vector<Index> vertex_u(static_cast<std::size_t>(nv), -1);
  for (Index k = 0; k < m; ++k)
    vertex_u[static_cast<std::size_t>(w.control_vertex[static_cast<std::size_t>(k)])] = k;

  w.Wu = Dense::Zero(m, m);
  for (const auto &e : mesh.gamma1_edges) {
    const auto &a = mesh.vertices[e[0]], &b = mesh.vertices[e[1]];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    const Index ia = vertex_u[e[0]], ib = vertex_u[e[1]];
    w.Wu(ia, ia) += len / 3.0;
    w.Wu(ib, ib) += len / 3.0;
    w.Wu(ia, ib) += len / 6.0;
    w.Wu(ib, ia) += len / 6.0;
  }
  Triplets tr;
  for (Index k = 0; k < m; ++k) {
    const Index pk = w.vertex_p[static_cast<std::size_t>(w.control_vertex[static_cast<std::size_t>(k)])];
    if (pk >= 0)
      tr.emplace_back(k, pk, 1.0);
  }
  w.Tr = from_triplets(m, np, tr);

  const Index nx = np + nq;
  PHNode &ph = w.node;
  ph.M = Sparse(nx, nx);
  {
    Triplets t;
    for (Index r = 0; r < np; ++r)
      for (Sparse::InnerIterator it(w.Mp, r); it; ++it)
        t.emplace_back(r, it.col(), it.value());
    for (Index r = 0; r < nq; ++r)
      for (Sparse::InnerIterator it(w.Mq, r); it; ++it)
        t.emplace_back(np + r, np + it.col(), it.value());
    ph.M = from_triplets(nx, nx, t);
  }
  const Dense G = Dense(w.G), Tr = Dense(w.Tr);
  ph.FG = Dense::Zero(nx, nx + m);
  ph.FG.block(0, 0, np, np) = -Dense(w.Md);
  ph.FG.block(0, np, np, nq) = -G.transpose();
  ph.FG.block(0, nx, np, m) = Tr.transpose() * w.Wu;
  ph.FG.block(np, 0, nq, np) = G;
  ph.KL = Dense::Zero(m, nx + m);
  ph.KL.block(0, 0, m, np) = -Tr;
  ph.H = Dense::Zero(nx, nx);
  ph.H.diagonal().head(np).setConstant(1.0 / params.rho);
  ph.H.diagonal().tail(nq).setConstant(params.T_mod);
  ph.Wu = w.Wu;
  ph.validate();
  ph = with_dissipation(std::move(ph));
  return w;
}

WaveModel assemble_wave(const WaveParams &params) {
  return assemble_wave(build_lshape_mesh(params.n), params);
}

DisplacementOperator::DisplacementOperator(const WaveModel &model)
    : G_(model.G), T_mod_(model.params.T_mod) {
  mq_.compute(Eigen::SparseMatrix<double>(model.Mq));
  if (mq_.info() != Eigen::Success)
    throw FactorizationError("stress mass matrix factorization failed", -1);
  const Dense G = Dense(model.G);
  Dense MqinvG(G.rows(), G.cols());
  for (Index j = 0; j < G.cols(); ++j)
    MqinvG.col(j) = mq_.solve(Vec(G.col(j)));
  const Dense S = G.transpose() * MqinvG / T_mod_;
  Eigen::LDLT<Dense> ldlt(S);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
    throw FactorizationError("displacement system is singular",
                             cholesky_failure_pivot(S));
  F_ = ldlt.solve(Dense(G.transpose()));
}

Vec DisplacementOperator::apply(const Vec &q) const {
  if (q.size() != F_.cols())
    throw DimensionError("stress vector has wrong length");
  return F_ * q;
}

Vec DisplacementOperator::gradient(const Vec &w) const {
  return mq_.solve(Vec(G_ * w)) / T_mod_;
}

Vec displacement_reconstruct(const WaveModel &model, const Vec &q) {
  return model.to_vertices(DisplacementOperator(model).apply(q));
}

TerminalWeight wave_terminal_weight(const WaveModel &model, const DisplacementOperator &disp,
                                    const Vec &w_f_pdofs, double alpha_T) {
  const Index np = model.np(), nq = model.nq();
  Dense F = Dense::Zero(2 * np, np + nq);
  F.topLeftCorner(np, np).setIdentity();
  F.bottomRightCorner(np, nq) = disp.matrix();
  Vec z = Vec::Zero(2 * np);
  z.tail(np) = w_f_pdofs;
  Dense Wz = Dense::Zero(2 * np, 2 * np);
  Wz.topLeftCorner(np, np) = Dense(model.Mp);
  Wz.bottomRightCorner(np, np) = Dense(model.Mp);
  return TerminalWeight(std::move(F), std::move(z), alpha_T, std::move(Wz));
}

void write_field_snapshots(const std::string &path, const MeshL &mesh,
                           const std::vector<double> &times,
                           const std::vector<Vec> &vertex_fields) {
  if (times.size() != vertex_fields.size())
    throw DimensionError("one field per snapshot time");
  std::ofstream os(path);
  if (!os)
    throw Error("cannot open " + path);
  os << "t,x,y,value\n" << std::setprecision(17);
  for (std::size_t s = 0; s < times.size(); ++s)
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
      os << times[s] << ',' << mesh.vertices[v][0] << ',' << mesh.vertices[v][1] << ','
         << vertex_fields[s](static_cast<Index>(v)) << '\n';
}

} // namespace evoctrl

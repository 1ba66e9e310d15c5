#pragma once

#include "evoctrl/ph.hpp"
#include "evoctrl/timegrid.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace evoctrl {

/// L-shaped domain (0,1)x(0,2) U (1,2)x(0,1) on a structured grid of side
/// 1/n. Each square is split along its (i,j)-(i+1,j+1) diagonal.
struct MeshL {
  Index n = 0;
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<Index, 3>> triangles; // counter-clockwise
  std::vector<std::array<Index, 2>> gamma0_edges;
  std::vector<std::array<Index, 2>> gamma1_edges;
  std::vector<bool> on_gamma0; // closed Gamma0, corners included

  double h() const { return 1.0 / static_cast<double>(n); }
  double triangle_area(Index t) const;
};

MeshL build_lshape_mesh(Index n);

/// Distance from every vertex to the union of Gamma0 edges.
Vec distance_to_gamma0(const MeshL &mesh);

void write_mesh_csv(const std::string &dir, const MeshL &mesh);

struct WaveParams {
  double rho = 1.0;
  double T_mod = 1.0;
  /// Damping, evaluated once per triangle at its centroid.
  std::function<double(double, double)> d = [](double, double) { return 0.05; };
  Index n = 8;
};

/// Mixed P1 discretization. State x = (p, q): p on vertices off Gamma0,
/// q vector-P1 on all vertices (interleaved components). Controls are
/// nodal values on the Gamma1 vertices, endpoints included.
struct WaveModel {
  MeshL mesh;
  WaveParams params;
  std::vector<Index> p_vertex;   // p dof -> vertex
  std::vector<Index> vertex_p;   // vertex -> p dof or -1
  std::vector<Index> control_vertex;
  Sparse Mp, Mq, Md, G, Tr;      // G: q x p, int grad(phi_j) . psi_i
  Dense Wu;
  PHNode node;

  Index np() const { return static_cast<Index>(p_vertex.size()); }
  Index nq() const { return Mq.rows(); }
  Index n() const { return np() + nq(); }
  Index m() const { return static_cast<Index>(control_vertex.size()); }

  /// 1/2 <p, rho^-1 p>.
  double kinetic_energy(const Vec &x) const;
  /// Nodal p-dof field to all vertices (zeros on Gamma0).
  Vec to_vertices(const Vec &pdofs) const;
  /// Restriction of a vertex field to the p dofs.
  Vec to_pdofs(const Vec &vertex_values) const;
};

WaveModel assemble_wave(const MeshL &mesh, const WaveParams &params);
WaveModel assemble_wave(const WaveParams &params);

/// Solves T^-1 G^T Mq^-1 G w = G^T q for w on the p dofs: the displacement
/// whose discrete gradient T^-1 Mq^-1 G w matches q up to the kernel of G^T.
class DisplacementOperator {
public:
  explicit DisplacementOperator(const WaveModel &model);

  Vec apply(const Vec &q) const;
  /// w = F_disp q as a dense matrix (p dofs x q dofs).
  const Dense &matrix() const { return F_; }
  /// Discrete stress of a displacement: T^-1 Mq^-1 G w.
  Vec gradient(const Vec &w) const;

private:
  Dense F_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mq_;
  Sparse G_;
  double T_mod_;
};

/// Vertex displacement field from a stress vector.
Vec displacement_reconstruct(const WaveModel &model, const Vec &q);

/// Terminal weight alpha_T/2 (||p||^2 + ||w - w_f||^2) in L2 on the p dofs.
TerminalWeight wave_terminal_weight(const WaveModel &model, const DisplacementOperator &disp,
                                    const Vec &w_f_pdofs, double alpha_T);

/// CSV `t,x,y,value` for vertex fields at the given times.
void write_field_snapshots(const std::string &path, const MeshL &mesh,
                           const std::vector<double> &times,
                           const std::vector<Vec> &vertex_fields);

} // namespace evoctrl

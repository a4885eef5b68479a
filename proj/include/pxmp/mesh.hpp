#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <vector>

#include "pxmp/expr.hpp"

namespace pxmp {

/// One quadrature point of the global rule, element-major order.
struct QuadPoint {
  Eigen::Vector2d x;   // position (y = 0 in 1D)
  double weight;       // includes the element Jacobian
  int element;
};

/// Conforming P1 mesh of (0,1) or (0,1)^2 with the quadrature rule used by
/// every integral in the library: 3-point Gauss per segment, edge-midpoint
/// rule per triangle. Weights per element sum to the element measure.
class Mesh {
 public:
  /// Uniform mesh of (0,1) with n segments. Boundary = {0, 1}.
  static Mesh interval(int n);
  /// Structured n x n grid of (0,1)^2, two triangles per cell.
  /// Boundary = all nodes with a coordinate in {0, 1}.
  static Mesh unit_square(int n);

  int dim() const { return dim_; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int element_count() const { return static_cast<int>(elements_.size()); }
  int free_count() const { return static_cast<int>(vertex_of_free_.size()); }
  int nodes_per_element() const { return dim_ + 1; }
  double domain_measure() const { return domain_measure_; }

  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& elements() const { return elements_; }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }
  bool on_boundary(int vertex) const { return on_boundary_[vertex] != 0; }

  /// Free-node (non-Dirichlet) numbering.
  int free_index(int vertex) const { return free_of_vertex_[vertex]; }
  int free_vertex(int f) const { return vertex_of_free_[f]; }

  const std::vector<QuadPoint>& quadrature() const { return quad_; }
  int quadrature_count() const { return static_cast<int>(quad_.size()); }
  /// P1 shape values of the element's local vertices at quadrature point q.
  const std::array<double, 3>& shape_at(int q) const { return shape_at_quad_[q]; }

  double element_measure(int e) const { return element_measure_[e]; }
  /// Constant gradient of the local vertex hat functions on element e.
  const std::array<Eigen::Vector2d, 3>& shape_gradients(int e) const { return shape_grad_[e]; }

 private:
  int dim_ = 1;
  double domain_measure_ = 0.0;
  std::vector<Eigen::Vector2d> vertices_;
  std::vector<std::array<int, 3>> elements_;  // elements_[e][2] == -1 in 1D
  std::vector<int> boundary_nodes_;
  std::vector<char> on_boundary_;
  std::vector<int> free_of_vertex_;
  std::vector<int> vertex_of_free_;
  std::vector<QuadPoint> quad_;
  std::vector<std::array<double, 3>> shape_at_quad_;
  std::vector<double> element_measure_;
  std::vector<std::array<Eigen::Vector2d, 3>> shape_grad_;

  void finalize();  // numbering, quadrature, geometry caches
};

/// Continuous piecewise-linear function given by vertex values. Members of
/// the zero-trace space carry zeros on all boundary nodes.
struct FeFunction {
  const Mesh* mesh = nullptr;
  Eigen::VectorXd nodal;

  static FeFunction zero(const Mesh& m);
  static FeFunction from_nodal(const Mesh& m, Eigen::VectorXd values);
  /// Sample a callable (x, y) -> value at the vertices.
  static FeFunction sample(const Mesh& m, const std::function<double(double, double)>& f);
  static FeFunction sample(const Mesh& m, const Expr& e);

  /// Interpolated value at quadrature point q.
  double at_quad(int q) const;
  /// Constant gradient on element e.
  Eigen::Vector2d gradient(int e) const;

  double max_abs() const { return nodal.size() ? nodal.cwiseAbs().maxCoeff() : 0.0; }
  double min() const { return nodal.size() ? nodal.minCoeff() : 0.0; }
  double max() const { return nodal.size() ? nodal.maxCoeff() : 0.0; }
  /// Minimum over non-boundary vertices.
  double interior_min() const;

  /// Largest |value| on a Dirichlet node.
  double trace_max_abs() const;
  bool zero_trace(double tol = 0.0) const { return trace_max_abs() <= tol; }

  /// Gather the free-node part / scatter it back (boundary forced to zero).
  Eigen::VectorXd free_values() const;
  void set_free_values(const Eigen::VectorXd& values);
};

/// Throws MeshMismatch unless both arguments live on the same mesh object.
void require_same_mesh(const FeFunction& a, const FeFunction& b);

}  // namespace pxmp

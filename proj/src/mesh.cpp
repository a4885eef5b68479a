#include "pxmp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pxmp/errors.hpp"

namespace pxmp {

namespace {
// 3-point Gauss-Legendre on [-1, 1].
constexpr double kGaussNode = 0.7745966692414834;  // sqrt(3/5)
constexpr double kGaussW0 = 5.0 / 9.0;
constexpr double kGaussW1 = 8.0 / 9.0;
}  // namespace

Mesh Mesh::interval(int n) {
  if (n < 2) throw InvalidSize("interval mesh needs n >= 2");
  Mesh m;
  m.dim_ = 1;
  m.vertices_.resize(n + 1);
  for (int i = 0; i <= n; ++i) m.vertices_[i] = {static_cast<double>(i) / n, 0.0};
  m.elements_.resize(n);
  for (int e = 0; e < n; ++e) m.elements_[e] = {e, e + 1, -1};
  m.on_boundary_.assign(n + 1, 0);
  m.on_boundary_.front() = 1;
  m.on_boundary_.back() = 1;
  m.finalize();
  return m;
}

Mesh Mesh::unit_square(int n) {
  if (n < 2) throw InvalidSize("square mesh needs n >= 2");
  Mesh m;
  m.dim_ = 2;
  const int nv = (n + 1) * (n + 1);
  m.vertices_.resize(nv);
  m.on_boundary_.assign(nv, 0);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      m.vertices_[id(i, j)] = {static_cast<double>(i) / n, static_cast<double>(j) / n};
      if (i == 0 || i == n || j == 0 || j == n) m.on_boundary_[id(i, j)] = 1;
    }
  }
  m.elements_.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      m.elements_.push_back({v00, v10, v11});
      m.elements_.push_back({v00, v11, v01});
    }
  }
  m.finalize();
  return m;
}

void Mesh::finalize() {
  const int nv = vertex_count();
  free_of_vertex_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (on_boundary_[v]) {
      boundary_nodes_.push_back(v);
    } else {
      free_of_vertex_[v] = static_cast<int>(vertex_of_free_.size());
      vertex_of_free_.push_back(v);
    }
  }

  const int ne = element_count();
  element_measure_.resize(ne);
  shape_grad_.resize(ne);
  domain_measure_ = 0.0;

  for (int e = 0; e < ne; ++e) {
    const auto& el = elements_[e];
    if (dim_ == 1) {
      const double a = vertices_[el[0]].x(), b = vertices_[el[1]].x();
      const double h = b - a;
      if (h <= 0.0) throw InvalidSize("element with non-positive length");
      element_measure_[e] = h;
      shape_grad_[e] = {Eigen::Vector2d{-1.0 / h, 0.0}, Eigen::Vector2d{1.0 / h, 0.0},
                        Eigen::Vector2d::Zero()};
      const double mid = 0.5 * (a + b), half = 0.5 * h;
      const double xs[3] = {mid - half * kGaussNode, mid, mid + half * kGaussNode};
      const double ws[3] = {half * kGaussW0, half * kGaussW1, half * kGaussW0};
      for (int k = 0; k < 3; ++k) {
        quad_.push_back({{xs[k], 0.0}, ws[k], e});
        const double phi_b = (xs[k] - a) / h;
        shape_at_quad_.push_back({1.0 - phi_b, phi_b, 0.0});
      }
    } else {
      const Eigen::Vector2d p0 = vertices_[el[0]], p1 = vertices_[el[1]], p2 = vertices_[el[2]];
      const Eigen::Vector2d d1 = p1 - p0, d2 = p2 - p0;
      const double det = d1.x() * d2.y() - d1.y() * d2.x();
      if (det <= 0.0) throw InvalidSize("triangle with non-positive area");
      const double area = 0.5 * det;
      element_measure_[e] = area;
      // Gradients of barycentric coordinates.
      shape_grad_[e] = {
          Eigen::Vector2d{(p1.y() - p2.y()) / det, (p2.x() - p1.x()) / det},
          Eigen::Vector2d{(p2.y() - p0.y()) / det, (p0.x() - p2.x()) / det},
          Eigen::Vector2d{(p0.y() - p1.y()) / det, (p1.x() - p0.x()) / det},
      };
      // Edge-midpoint rule: exact for quadratics.
      const std::array<std::array<double, 3>, 3> bary = {{
          {0.5, 0.5, 0.0},
          {0.0, 0.5, 0.5},
          {0.5, 0.0, 0.5},
      }};
      for (const auto& b : bary) {
        Eigen::Vector2d x = b[0] * p0 + b[1] * p1 + b[2] * p2;
        quad_.push_back({x, area / 3.0, e});
        shape_at_quad_.push_back({b[0], b[1], b[2]});
      }
    }
    domain_measure_ += element_measure_[e];
  }
}

FeFunction FeFunction::zero(const Mesh& m) {
  return {&m, Eigen::VectorXd::Zero(m.vertex_count())};
}

FeFunction FeFunction::from_nodal(const Mesh& m, Eigen::VectorXd values) {
  if (values.size() != m.vertex_count()) throw InvalidSize("nodal vector length != vertex count");
  return {&m, std::move(values)};
}

FeFunction FeFunction::sample(const Mesh& m, const std::function<double(double, double)>& f) {
  Eigen::VectorXd v(m.vertex_count());
  for (int i = 0; i < m.vertex_count(); ++i) {
    v[i] = f(m.vertices()[i].x(), m.vertices()[i].y());
  }
  return {&m, std::move(v)};
}

FeFunction FeFunction::sample(const Mesh& m, const Expr& e) {
  return sample(m, [&e](double x, double y) { return e.eval(x, y); });
}

double FeFunction::at_quad(int q) const {
  const auto& el = mesh->elements()[mesh->quadrature()[q].element];
  const auto& s = mesh->shape_at(q);
  double v = s[0] * nodal[el[0]] + s[1] * nodal[el[1]];
  if (mesh->dim() == 2) v += s[2] * nodal[el[2]];
  return v;
}

Eigen::Vector2d FeFunction::gradient(int e) const {
  const auto& el = mesh->elements()[e];
  const auto& g = mesh->shape_gradients(e);
  Eigen::Vector2d grad = nodal[el[0]] * g[0] + nodal[el[1]] * g[1];
  if (mesh->dim() == 2) grad += nodal[el[2]] * g[2];
  return grad;
}

double FeFunction::interior_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (int f = 0; f < mesh->free_count(); ++f) m = std::min(m, nodal[mesh->free_vertex(f)]);
  return m;
}

double FeFunction::trace_max_abs() const {
  double m = 0.0;
  for (int b : mesh->boundary_nodes()) m = std::max(m, std::fabs(nodal[b]));
  return m;
}

Eigen::VectorXd FeFunction::free_values() const {
  Eigen::VectorXd v(mesh->free_count());
  for (int f = 0; f < mesh->free_count(); ++f) v[f] = nodal[mesh->free_vertex(f)];
  return v;
}

void FeFunction::set_free_values(const Eigen::VectorXd& values) {
  if (values.size() != mesh->free_count()) throw InvalidSize("free vector length != free count");
  nodal.setZero();
  for (int f = 0; f < mesh->free_count(); ++f) nodal[mesh->free_vertex(f)] = values[f];
}

void require_same_mesh(const FeFunction& a, const FeFunction& b) {
  if (a.mesh == nullptr || a.mesh != b.mesh) {
    throw MeshMismatch("functions live on different meshes");
  }
}

}  // namespace pxmp

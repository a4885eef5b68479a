#include "pxmp/exponent.hpp"

#include <cmath>
#include <limits>

#include "pxmp/errors.hpp"

namespace pxmp {

ExponentField::ExponentField(const Mesh& m, std::vector<double> values, std::optional<Expr> source)
    : mesh_(&m), values_(std::move(values)), source_(std::move(source)) {
  min_ = std::numeric_limits<double>::infinity();
  max_ = -std::numeric_limits<double>::infinity();
  for (double v : values_) {
    if (!std::isfinite(v) || v <= 1.0) {
      throw ExponentOutOfRange("exponent must satisfy 1 < p(x) < inf at every quadrature point");
    }
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
}

ExponentField ExponentField::constant(const Mesh& m, double value) {
  return ExponentField(m, std::vector<double>(m.quadrature_count(), value), Expr::constant(value));
}

ExponentField ExponentField::from_expression(const Mesh& m, Expr e) {
  std::vector<double> v(m.quadrature_count());
  for (int q = 0; q < m.quadrature_count(); ++q) {
    const auto& x = m.quadrature()[q].x;
    v[q] = e.eval(x.x(), x.y());
  }
  return ExponentField(m, std::move(v), std::move(e));
}

ExponentField ExponentField::conjugate() const {
  if (min_ <= 1.0) throw ExponentOutOfRange("conjugate exponent needs p- > 1");
  std::vector<double> v(values_.size());
  for (std::size_t q = 0; q < values_.size(); ++q) v[q] = values_[q] / (values_[q] - 1.0);
  return ExponentField(*mesh_, std::move(v), std::nullopt);
}

void require_same_mesh(const FeFunction& u, const ExponentField& p) {
  if (u.mesh == nullptr || u.mesh != &p.mesh()) {
    throw MeshMismatch("function and exponent field live on different meshes");
  }
}

void require_same_mesh(const ExponentField& p, const ExponentField& q) {
  if (&p.mesh() != &q.mesh()) throw MeshMismatch("exponent fields live on different meshes");
}

}  // namespace pxmp

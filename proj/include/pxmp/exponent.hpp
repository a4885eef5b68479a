#pragma once

#include <optional>
#include <vector>

#include "pxmp/expr.hpp"
#include "pxmp/mesh.hpp"

namespace pxmp {

/// A variable exponent p(.) sampled at the quadrature points of a mesh,
/// with cached essential bounds. Construction enforces 1 < p- <= p+ < inf
/// at every quadrature point.
class ExponentField {
 public:
  static ExponentField constant(const Mesh& m, double value);
  static ExponentField from_expression(const Mesh& m, Expr e);

  double at(int q) const { return values_[q]; }
  const std::vector<double>& values() const { return values_; }
  double min_exponent() const { return min_; }
  double max_exponent() const { return max_; }

  const Mesh& mesh() const { return *mesh_; }
  const std::optional<Expr>& source() const { return source_; }

  /// Pointwise conjugate exponent p' with 1/p + 1/p' = 1.
  ExponentField conjugate() const;

 private:
  ExponentField(const Mesh& m, std::vector<double> values, std::optional<Expr> source);
  const Mesh* mesh_;
  std::vector<double> values_;
  double min_ = 0.0, max_ = 0.0;
  std::optional<Expr> source_;
};

void require_same_mesh(const FeFunction& u, const ExponentField& p);
void require_same_mesh(const ExponentField& p, const ExponentField& q);

}  // namespace pxmp

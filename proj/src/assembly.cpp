#include "pxmp/assembly.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pxmp/errors.hpp"

namespace pxmp {

namespace {

struct TruncatedSource {
  const TruncatedProblem* prob;
  double g(double t) const { return prob->f(t); }
  double G(double t) const { return prob->F(t); }
  double dg(double t) const { return prob->df(t); }
};

struct ConstantLoadSource {
  double lambda;
  double g(double) const { return -lambda; }
  double G(double t) const { return -lambda * t; }
  double dg(double) const { return 0.0; }
};

struct NoSource {
  double g(double) const { return 0.0; }
  double G(double) const { return 0.0; }
  double dg(double) const { return 0.0; }
};

// Single pass filling whichever of energy / gradient / Hessian triplets is
// requested. Element-major quadrature order keeps sums bitwise reproducible.
template <class Source>
void assemble_core(const FeFunction& u, const ExponentField& p, const Source& src, double* energy,
                   Eigen::VectorXd* gradient, std::vector<Eigen::Triplet<double>>* hessian,
                   double eps) {
  require_same_mesh(u, p);
  const Mesh& m = *u.mesh;
  const int nloc = m.nodes_per_element();

  if (energy) *energy = 0.0;
  if (gradient) *gradient = Eigen::VectorXd::Zero(m.free_count());

  int q = 0;  // global quadrature index, element-major
  const int quads_per_element = m.quadrature_count() / m.element_count();
  for (int e = 0; e < m.element_count(); ++e) {
    const auto& el = m.elements()[e];
    const auto& grads = m.shape_gradients(e);
    const Eigen::Vector2d gu = u.gradient(e);
    const double s = gu.norm();

    std::array<int, 3> free_id = {-1, -1, -1};
    std::array<double, 3> gu_dot_grad = {0.0, 0.0, 0.0};
    for (int l = 0; l < nloc; ++l) {
      free_id[l] = m.free_index(el[l]);
      gu_dot_grad[l] = gu.dot(grads[l]);
    }

    for (int k = 0; k < quads_per_element; ++k, ++q) {
      const double w = m.quadrature()[q].weight;
      const double pq = p.at(q);
      const double uq = u.at_quad(q);
      const auto& shape = m.shape_at(q);

      if (energy) {
        const double principal = s > 0.0 ? std::pow(s, pq) / pq : 0.0;
        *energy += w * (principal - src.G(uq));
      }
      if (gradient) {
        const double flux = s > 0.0 ? std::pow(s, pq - 2.0) : 0.0;
        const double gq = src.g(uq);
        for (int l = 0; l < nloc; ++l) {
          if (free_id[l] < 0) continue;
          (*gradient)[free_id[l]] += w * (flux * gu_dot_grad[l] - gq * shape[l]);
        }
      }
      if (hessian) {
        const double s2 = s * s + eps;
        const double c1 = std::pow(s2, 0.5 * (pq - 2.0));
        const double c2 = (pq - 2.0) * c1 / s2;
        const double dgq = src.dg(uq);
        for (int l = 0; l < nloc; ++l) {
          if (free_id[l] < 0) continue;
          for (int r = 0; r < nloc; ++r) {
            if (free_id[r] < 0) continue;
            const double val = w * (c1 * grads[l].dot(grads[r]) +
                                    c2 * gu_dot_grad[l] * gu_dot_grad[r] - dgq * shape[l] * shape[r]);
            hessian->emplace_back(free_id[l], free_id[r], val);
          }
        }
      }
    }
  }
}

template <class Source>
double energy_impl(const FeFunction& u, const ExponentField& p, const Source& src) {
  double e = 0.0;
  assemble_core(u, p, src, &e, nullptr, nullptr, 0.0);
  return e;
}

template <class Source>
AssemblyResult gradient_impl(const FeFunction& u, const ExponentField& p, const Source& src) {
  AssemblyResult out;
  assemble_core(u, p, src, &out.energy, &out.gradient, nullptr, 0.0);
  return out;
}

template <class Source>
AssemblyResult hessian_impl(const FeFunction& u, const ExponentField& p, const Source& src,
                            double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("hessian regularization eps must be positive");
  AssemblyResult out;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(u.mesh->quadrature_count()) * 9);
  assemble_core(u, p, src, &out.energy, &out.gradient, &triplets, eps);
  Eigen::SparseMatrix<double> H(u.mesh->free_count(), u.mesh->free_count());
  H.setFromTriplets(triplets.begin(), triplets.end());
  out.hessian = std::move(H);
  return out;
}

}  // namespace

double assemble_energy(const FeFunction& u, const ExponentField& p, const TruncatedProblem& prob) {
  return energy_impl(u, p, TruncatedSource{&prob});
}

AssemblyResult assemble_gradient(const FeFunction& u, const ExponentField& p,
                                 const TruncatedProblem& prob) {
  return gradient_impl(u, p, TruncatedSource{&prob});
}

AssemblyResult assemble_hessian(const FeFunction& u, const ExponentField& p,
                                const TruncatedProblem& prob, double eps) {
  return hessian_impl(u, p, TruncatedSource{&prob}, eps);
}

double torsion_energy(const FeFunction& v, const ExponentField& p, double lambda) {
  return energy_impl(v, p, ConstantLoadSource{lambda});
}

AssemblyResult torsion_gradient(const FeFunction& v, const ExponentField& p, double lambda) {
  return gradient_impl(v, p, ConstantLoadSource{lambda});
}

AssemblyResult torsion_hessian(const FeFunction& v, const ExponentField& p, double lambda,
                               double eps) {
  return hessian_impl(v, p, ConstantLoadSource{lambda}, eps);
}

Eigen::SparseMatrix<double> assemble_stiffness(const Mesh& m) {
  std::vector<Eigen::Triplet<double>> triplets;
  const int nloc = m.nodes_per_element();
  for (int e = 0; e < m.element_count(); ++e) {
    const auto& el = m.elements()[e];
    const auto& grads = m.shape_gradients(e);
    for (int l = 0; l < nloc; ++l) {
      const int fl = m.free_index(el[l]);
      if (fl < 0) continue;
      for (int r = 0; r < nloc; ++r) {
        const int fr = m.free_index(el[r]);
        if (fr < 0) continue;
        triplets.emplace_back(fl, fr, m.element_measure(e) * grads[l].dot(grads[r]));
      }
    }
  }
  Eigen::SparseMatrix<double> K(m.free_count(), m.free_count());
  K.setFromTriplets(triplets.begin(), triplets.end());
  return K;
}

Eigen::VectorXd assemble_load(const Mesh& m) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(m.free_count());
  const int nloc = m.nodes_per_element();
  for (int q = 0; q < m.quadrature_count(); ++q) {
    const auto& el = m.elements()[m.quadrature()[q].element];
    const auto& shape = m.shape_at(q);
    for (int l = 0; l < nloc; ++l) {
      const int f = m.free_index(el[l]);
      if (f >= 0) load[f] += m.quadrature()[q].weight * shape[l];
    }
  }
  return load;
}

Eigen::VectorXd p_laplacian_action(const FeFunction& u, const ExponentField& p) {
  AssemblyResult r = gradient_impl(u, p, NoSource{});
  return std::move(r.gradient);
}

double nonpositive_measure(const FeFunction& u) {
  // The set {u <= 0} lives in the open domain; edge-midpoint quadrature
  // points that fall on the Dirichlet boundary (where u == 0 by constraint)
  // do not witness an interior sign change.
  const Mesh& m = *u.mesh;
  const auto on_unit_boundary = [](double c) { return c < 1e-14 || c > 1.0 - 1e-14; };
  double measure = 0.0;
  for (int q = 0; q < m.quadrature_count(); ++q) {
    const auto& x = m.quadrature()[q].x;
    if (on_unit_boundary(x.x()) || (m.dim() == 2 && on_unit_boundary(x.y()))) continue;
    if (u.at_quad(q) <= 0.0) measure += m.quadrature()[q].weight;
  }
  return measure;
}

}  // namespace pxmp

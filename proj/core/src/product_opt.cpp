#include "bellclass/product_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bellclass/states.hpp"

namespace bellclass {

ComplexVector random_unit_vector(int d, Rng& rng) {
  ComplexVector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(rng.normal(), rng.normal());
  return v / v.norm();
}

ComplexVector vector_from_angles(const double* theta, const double* phi, int d) {
  ComplexVector v(d);
  double s = 1.0;
  for (int j = 0; j + 1 < d; ++j) {
    const double r = s * std::cos(theta[j]);
    v(j) = j == 0 ? Complex(r, 0.0) : std::polar(r, phi[j - 1]);
    s *= std::sin(theta[j]);
  }
  v(d - 1) = d == 1 ? Complex(s, 0.0) : std::polar(s, phi[d - 2]);
  return v;
}

void angles_from_vector(const ComplexVector& v, double* theta, double* phi) {
  const auto d = static_cast<int>(v.size());
  const double phase0 = std::abs(v(0)) > 0.0 ? std::arg(v(0)) : 0.0;
  const double norm = v.norm();
  double remaining = 1.0;
  for (int j = 0; j + 1 < d; ++j) {
    const double r = std::abs(v(j)) / norm;
    theta[j] = remaining > 1e-300 ? std::acos(std::clamp(r / remaining, -1.0, 1.0)) : 0.0;
    remaining *= std::sin(theta[j]);
  }
  for (int j = 1; j < d; ++j) phi[j - 1] = std::arg(v(j)) - phase0;
}

namespace {

/// f(a,b), its gradient in the angle parameterization, and the alternating
/// eigenvector refinement. All buffers are owned to keep the hot loop
/// allocation-free.
class ProductObjective {
 public:
  ProductObjective(const std::vector<double>& kappa, int d)
      : d_(d), kappa_(kappa), w_(static_cast<std::size_t>(d)), z_(static_cast<std::size_t>(d) * d) {
    if (kappa.size() != static_cast<std::size_t>(d) * d) throw DomainError("kappa must have d^2 entries");
    for (int t = 0; t < d; ++t) w_[static_cast<std::size_t>(t)] = omega(d, t);
    inv_sqrt_d_ = 1.0 / std::sqrt(static_cast<double>(d));
  }

  int params() const { return 4 * (d_ - 1); }

  double value(const ComplexVector& a, const ComplexVector& b) {
    amplitudes(a, b);
    double f = 0.0;
    for (std::size_t t = 0; t < z_.size(); ++t) f += kappa_[t] * std::norm(z_[t]);
    return f;
  }

  /// Returns -f(x) and writes -grad f(x) into `grad` (minimization form).
  double negated(const Eigen::VectorXd& x, Eigen::VectorXd& grad, ComplexVector& a, ComplexVector& b) {
    const int n = d_ - 1;
    a = vector_from_angles(x.data(), x.data() + n, d_);
    b = vector_from_angles(x.data() + 2 * n, x.data() + 3 * n, d_);
    const double f = value(a, b);
    // Wirtinger gradients g_j = df/d conj(a_j), h_m = df/d conj(b_m).
    ComplexVector g = ComplexVector::Zero(d_), h = ComplexVector::Zero(d_);
    for (int k = 0; k < d_; ++k)
      for (int l = 0; l < d_; ++l) {
        const Complex kz = kappa_[static_cast<std::size_t>(k * d_ + l)] * z_[static_cast<std::size_t>(k * d_ + l)] * inv_sqrt_d_;
        for (int j = 0; j < d_; ++j) {
          const Complex phase = w_[static_cast<std::size_t>((j * k) % d_)];  // conj(w^{-jk})
          const int m = (j + l) % d_;
          g(j) += kz * phase * std::conj(b(m));
          h(m) += kz * phase * std::conj(a(j));
        }
      }
    chain(x.data(), x.data() + n, a, g, grad.data(), grad.data() + n);
    chain(x.data() + 2 * n, x.data() + 3 * n, b, h, grad.data() + 2 * n, grad.data() + 3 * n);
    grad = -grad;
    return -f;
  }

  /// Alternating exact maximization over one factor with the other fixed.
  /// Returns the final objective value; a and b are updated in place.
  double seesaw(ComplexVector& a, ComplexVector& b, int sweeps, double tol) {
    double f = value(a, b);
    ComplexMatrix m(d_, d_);
    ComplexVector u(d_);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      const double before = f;
      // Update a: z_kl = sum_j u_j a_j with u_j = w^{-jk} b_{j+l} / sqrt d.
      m.setZero();
      for (int k = 0; k < d_; ++k)
        for (int l = 0; l < d_; ++l) {
          for (int j = 0; j < d_; ++j)
            u(j) = std::conj(w_[static_cast<std::size_t>((j * k) % d_)]) * b((j + l) % d_) * inv_sqrt_d_;
          m.noalias() += kappa_[static_cast<std::size_t>(k * d_ + l)] * (u.conjugate() * u.transpose());
        }
      a = top_eigenvector(m);
      // Update b: z_kl = sum_m v_m b_m with v_m = w^{-(m-l)k} a_{m-l} / sqrt d.
      m.setZero();
      for (int k = 0; k < d_; ++k)
        for (int l = 0; l < d_; ++l) {
          for (int mm = 0; mm < d_; ++mm) {
            const int j = mod(mm - l, d_);
            u(mm) = std::conj(w_[static_cast<std::size_t>((j * k) % d_)]) * a(j) * inv_sqrt_d_;
          }
          m.noalias() += kappa_[static_cast<std::size_t>(k * d_ + l)] * (u.conjugate() * u.transpose());
        }
      b = top_eigenvector(m);
      f = value(a, b);
      if (std::abs(f - before) < tol) break;
    }
    return f;
  }

 private:
  void amplitudes(const ComplexVector& a, const ComplexVector& b) {
    for (int l = 0; l < d_; ++l)
      for (int k = 0; k < d_; ++k) {
        Complex acc = 0.0;
        for (int j = 0; j < d_; ++j)
          acc += std::conj(w_[static_cast<std::size_t>((j * k) % d_)]) * a(j) * b((j + l) % d_);
        z_[static_cast<std::size_t>(k * d_ + l)] = acc * inv_sqrt_d_;
      }
  }

  // df/dt = 2 Re sum_j conj(g_j) da_j/dt
  void chain(const double* theta, const double* phi, const ComplexVector& v, const ComplexVector& g,
             double* dtheta, double* dphi) const {
    const int n = d_ - 1;
    for (int j = 1; j < d_; ++j) dphi[j - 1] = 2.0 * std::real(std::conj(g(j)) * Complex(0.0, 1.0) * v(j));
    for (int m = 0; m < n; ++m) {
      double acc = 0.0;
      for (int j = m; j < d_; ++j) {
        // dr_j / dtheta_m
        double dr = 1.0;
        for (int i = 0; i < std::min(j, n); ++i) dr *= i == m ? std::cos(theta[i]) : std::sin(theta[i]);
        if (j < n) dr *= j == m ? -std::sin(theta[j]) : std::cos(theta[j]);
        const Complex phase = j == 0 ? Complex(1.0, 0.0) : std::polar(1.0, phi[j - 1]);
        acc += 2.0 * std::real(std::conj(g(j)) * phase) * dr;
      }
      dtheta[m] = acc;
    }
  }

  ComplexVector top_eigenvector(const ComplexMatrix& m) {
    solver_.compute(m);
    ComplexVector v = solver_.eigenvectors().col(d_ - 1);
    return v / v.norm();
  }

  int d_;
  std::vector<double> kappa_;
  std::vector<Complex> w_;
  std::vector<Complex> z_;
  double inv_sqrt_d_ = 1.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver_;
};

struct DescentResult {
  ComplexVector a, b;
  double value = 0.0;
  bool converged = false;
};

DescentResult bfgs_maximize(ProductObjective& obj, Eigen::VectorXd x, const ProductOptimizerConfig& cfg) {
  const int p = obj.params();
  DescentResult out;
  Eigen::VectorXd grad(p), grad_new(p), x_new(p);
  ComplexVector a, b, a_new, b_new;
  double fx = obj.negated(x, grad, a, b);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(p, p);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (grad.norm() < 1e-12) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd dir = -hinv * grad;
    double slope = grad.dot(dir);
    if (slope >= 0.0) {
      hinv.setIdentity();
      dir = -grad;
      slope = -grad.squaredNorm();
    }
    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      x_new = x + step * dir;
      f_new = obj.negated(x_new, grad_new, a_new, b_new);
      if (f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;  // no further descent available at machine precision
      break;
    }
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = grad_new - grad;
    const double df = fx - f_new;
    x = x_new;
    fx = f_new;
    grad = grad_new;
    a = a_new;
    b = b_new;
    if (df < cfg.tolerance && s.lpNorm<Eigen::Infinity>() < cfg.tolerance) {
      out.converged = true;
      break;
    }
    const double sy = s.dot(y);
    if (sy > 1e-14) {
      const Eigen::VectorXd hy = hinv * y;
      const double rho = 1.0 / sy;
      hinv += rho * rho * (sy + y.dot(hy)) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }
  }
  out.a = a;
  out.b = b;
  out.value = -fx;
  return out;
}

}  // namespace

double product_objective(const std::vector<double>& kappa, const ComplexVector& a, const ComplexVector& b) {
  ProductObjective obj(kappa, static_cast<int>(a.size()));
  return obj.value(a / a.norm(), b / b.norm());
}

ProductOptimum maximize_over_products(const std::vector<double>& kappa, int d, Rng& rng,
                                      const ProductOptimizerConfig& cfg, const std::vector<ProductPoint>& seeds) {
  require_dimension(d);
  ProductObjective obj(kappa, d);
  const int starts = cfg.starts > 0 ? cfg.starts : 64 * d;
  const int n = d - 1;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(starts) + seeds.size());
  ProductOptimum out;
  out.best.value = -std::numeric_limits<double>::infinity();

  auto consider = [&](ComplexVector a, ComplexVector b) {
    const double f = obj.seesaw(a, b, cfg.polish_sweeps, 1e-15);
    values.push_back(f);
    if (f > out.best.value) out.best = {std::move(a), std::move(b), f};
  };

  for (const auto& seed : seeds) consider(seed.a / seed.a.norm(), seed.b / seed.b.norm());

  Eigen::VectorXd x(obj.params());
  for (int s = 0; s < starts; ++s) {
    angles_from_vector(random_unit_vector(d, rng), x.data(), x.data() + n);
    angles_from_vector(random_unit_vector(d, rng), x.data() + 2 * n, x.data() + 3 * n);
    auto r = bfgs_maximize(obj, x, cfg);
    if (r.converged) ++out.converged;
    consider(std::move(r.a), std::move(r.b));
  }
  out.starts = starts + static_cast<int>(seeds.size());
  out.agreeing = static_cast<int>(std::count_if(values.begin(), values.end(), [&](double v) {
    return v >= out.best.value - cfg.agreement;
  }));
  out.certified = out.agreeing >= cfg.min_agreeing;
  return out;
}

}  // namespace bellclass

#include "drem/fixtures.hpp"

#include <cmath>

namespace dremix::fixtures {

using S = AnalyticSignal;

LinearRegression non_pe_regression(const Eigen::Vector2d& theta) {
  return LinearRegression({S::constant(1.0), S::non_pe_regressor_entry()}, theta);
}

LinearRegression sincos_regression(const Eigen::Vector2d& theta) {
  return LinearRegression({S::sinusoid(1.0, 1.0), S::sinusoid(1.0, 1.0, M_PI / 2.0)}, theta);
}

LinearRegression rank_one_regression(const Eigen::Vector2d& theta) {
  return LinearRegression({S::constant(1.0), S::constant(0.0)}, theta);
}

LtiFilter unit_lag() { return LtiFilter::first_order(1.0, 1.0); }

LtiFilter zero_phase_filter(double c) { return LtiFilter({c, c}, {1.0, 1.0, 2.0}); }

ParamMap scalar_example_map() {
  return ParamMap(
      "[theta-exp(-theta), cos(theta)]", 1, 2,
      [](const Eigen::VectorXd& th) {
        Eigen::VectorXd v(2);
        v << th(0) - std::exp(-th(0)), std::cos(th(0));
        return v;
      },
      [](const Eigen::VectorXd& th) {
        Matrix j(2, 1);
        j << 1.0 + std::exp(-th(0)), -std::sin(th(0));
        return j;
      });
}

FactorisableRegression scalar_example_regression(double theta) {
  return FactorisableRegression({{S::slow_sine_entry(), S::constant(1.0)}}, scalar_example_map(), {0},
                                Eigen::VectorXd::Constant(1, theta));
}

ParamMap vector_example_map() {
  return ParamMap(
      "[t1-exp(-t1)+t2, t2^3/3+t2+t1, sin(t1 t2)]", 2, 3,
      [](const Eigen::VectorXd& th) {
        Eigen::VectorXd v(3);
        v << th(0) - std::exp(-th(0)) + th(1), th(1) * th(1) * th(1) / 3.0 + th(1) + th(0), std::sin(th(0) * th(1));
        return v;
      },
      [](const Eigen::VectorXd& th) {
        Matrix j(3, 2);
        const double c = std::cos(th(0) * th(1));
        j << 1.0 + std::exp(-th(0)), 1.0,
             1.0, th(1) * th(1) + 1.0,
             th(1) * c, th(0) * c;
        return j;
      });
}

FactorisableRegression vector_example_regression(const Eigen::Vector2d& theta) {
  std::vector<std::vector<S>> m{
      {S::sinusoid(1.0, 1.0, M_PI / 2.0), S::sinusoid(1.0, 1.0), S::constant(1.0)},
      {S::constant(0.0), S::constant(0.0), S::constant(1.0)},
  };
  return FactorisableRegression(std::move(m), vector_example_map(), {0, 1}, theta);
}

FactorisableRegression vector_sinusoid_regression(const Eigen::Vector2d& theta) {
  std::vector<std::vector<S>> m{
      {S::sinusoid(1.0, 1.0), S::sinusoid(1.0, 2.0, 0.3), S::constant(1.0) + S::sinusoid(0.5, 3.0)},
      {S::sinusoid(1.0, 0.5, 1.0), S::sinusoid(0.8, 1.5), S::sinusoid(0.5, 1.0, 0.7)},
  };
  return FactorisableRegression(std::move(m), vector_example_map(), {0, 1}, theta);
}

ParametrisedSystem cubic_sine_system(double theta, double x_star, double offset) {
  const double xr = x_star + offset;
  const double u = xr * xr * xr - theta * std::sin(xr);
  ParametrisedSystem sys;
  sys.n = 1;
  sys.q = 1;
  sys.f0 = [u](const Eigen::VectorXd& x, double) {
    return Eigen::VectorXd::Constant(1, -x(0) * x(0) * x(0) + u);
  };
  sys.f1 = [](const Eigen::VectorXd& x, const Eigen::VectorXd& th) {
    return Eigen::VectorXd::Constant(1, th(0) * std::sin(x(0)));
  };
  sys.x_star = Eigen::VectorXd::Constant(1, x_star);
  sys.xi_star = [x_star](const Eigen::VectorXd& th) { return Eigen::VectorXd::Constant(1, th(0) * std::sin(x_star)); };
  sys.grad_xi_star = [x_star](const Eigen::VectorXd& th) { return Matrix::Constant(1, 1, th(0) * std::cos(x_star)); };
  sys.theta_true = Eigen::VectorXd::Constant(1, theta);
  return sys;
}

ParametrisedSystem planar_system(const Eigen::Vector2d& theta, bool excite) {
  ParametrisedSystem sys;
  sys.n = 2;
  sys.q = 2;
  sys.f0 = [excite](const Eigen::VectorXd& x, double t) {
    Eigen::VectorXd v = -x;
    if (excite) {
      v(0) += 0.5 * std::sin(t);
      v(1) += 0.5 * std::cos(1.7 * t);
    }
    return v;
  };
  sys.f1 = [](const Eigen::VectorXd& x, const Eigen::VectorXd& th) {
    Eigen::VectorXd v(2);
    v << th(0) * std::sin(x(1)), th(1) * std::tanh(x(0));
    return v;
  };
  sys.x_star = Eigen::VectorXd::Zero(2);
  sys.xi_star = [](const Eigen::VectorXd&) { return Eigen::VectorXd(Eigen::VectorXd::Zero(2)); };
  sys.grad_xi_star = [](const Eigen::VectorXd& th) {
    Matrix g(2, 2);
    // column i is the gradient of component i
    g << 0.0, th(1),
         th(0), 0.0;
    return g;
  };
  sys.theta_true = theta;
  return sys;
}

}  // namespace dremix::fixtures

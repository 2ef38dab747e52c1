#include "hrom/diagnostics.hpp"

#include <cmath>

#include "hrom/errors.hpp"

namespace hrom {

double plane_wave_frequency(double alpha, double beta, double amplitude,
                            double c1, double c2) {
  return alpha * (c1 * c1 + c2 * c2) + beta * amplitude * amplitude;
}

std::complex<double> plane_wave_value(const PlaneWave& wave, double t, double x,
                                      double y) {
  const double phase = wave.c1 * x + wave.c2 * y - wave.omega * t;
  return std::polar(wave.amplitude, phase);
}

bool plane_wave_periodic_on(const PlaneWave& wave, double width, double height) {
  auto fits = [](double c, double len) {
    const double cycles = c * len / (2.0 * M_PI);
    return std::abs(cycles - std::round(cycles)) < 1e-9;
  };
  return fits(wave.c1, width) && fits(wave.c2, height);
}

Eigen::VectorXd plane_wave_state(const DgSpace& space, const MassMatrix& mass,
                                 const PlaneWave& wave, double t) {
  const long N = space.dimension();
  Eigen::VectorXd z(2 * N);
  z.head(N) = l2_project(space, mass, [&](double x, double y) {
    return plane_wave_value(wave, t, x, y).real();
  });
  z.tail(N) = l2_project(space, mass, [&](double x, double y) {
    return plane_wave_value(wave, t, x, y).imag();
  });
  return z;
}

Eigen::VectorXd gaussian_state(const DgSpace& space, const MassMatrix& mass) {
  const long N = space.dimension();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2 * N);
  z.head(N) = l2_project(space, mass, [](double x, double y) {
    return std::exp(-0.5 * (x * x + y * y)) / std::sqrt(M_PI);
  });
  return z;
}

double discrete_mass(const MassMatrix& mass, const Eigen::VectorXd& z) {
  if (z.size() != 2 * mass.dimension()) {
    throw ConfigError("discrete_mass: state must have length 2N");
  }
  return z.dot(mass.apply(z));
}

double discrete_energy(const OperatorSet& ops, const Eigen::VectorXd& z) {
  const DgSpace& space = ops.space();
  const long N = space.dimension();
  if (z.size() != 2 * N) throw ConfigError("discrete_energy: state must have length 2N");

  const double quadratic = 0.5 * z.dot(ops.apply_stiffness(z));

  const auto& rule = space.volume_rule();
  const auto& phi = space.basis_table();
  const int nq = space.local_dim();
  double quartic = 0.0;
  for (int e = 0; e < space.mesh().element_count(); ++e) {
    const Eigen::VectorXd rv =
        phi.transpose() * z.segment(space.dof(e, 0), nq);
    const Eigen::VectorXd sv =
        phi.transpose() * z.segment(N + space.dof(e, 0), nq);
    const double det = space.map_determinant(e);
    for (long q = 0; q < rule.weights.size(); ++q) {
      const double mod2 = rv(q) * rv(q) + sv(q) * sv(q);
      quartic += rule.weights(q) * det * mod2 * mod2;
    }
  }
  return quadratic + 0.25 * ops.physics().beta * quartic;
}

void InvariantSeries::append(double t, double m, double e) {
  time.push_back(t);
  mass.push_back(m);
  energy.push_back(e);
}

namespace {
double drift(const std::vector<double>& series) {
  if (series.empty()) return 0.0;
  double d = 0.0;
  for (double v : series) d = std::max(d, std::abs(v - series.front()));
  return d;
}
}  // namespace

double InvariantSeries::mass_drift() const { return drift(mass); }
double InvariantSeries::energy_drift() const { return drift(energy); }

double relative_l2l2_error(const Eigen::MatrixXd& states,
                           const Eigen::MatrixXd& reference,
                           const MassMatrix& mass) {
  if (states.rows() != reference.rows() || states.cols() != reference.cols()) {
    throw ConfigError("relative_l2l2_error: series are not aligned");
  }
  double num = 0.0;
  double den = 0.0;
  for (long c = 0; c < states.cols(); ++c) {
    const Eigen::VectorXd diff = states.col(c) - reference.col(c);
    const Eigen::VectorXd ref = reference.col(c);
    num += diff.dot(mass.apply(diff));
    den += ref.dot(mass.apply(ref));
  }
  if (!(den > 0.0)) throw DegenerateInputError("relative_l2l2_error: zero reference");
  return std::sqrt(num / den);
}

double solution_l2_error(const DgSpace& space, const Eigen::VectorXd& z,
                         const ScalarField& exact_r, const ScalarField& exact_s) {
  const long N = space.dimension();
  const double er = l2_error_against(space, z.head(N), exact_r);
  const double es = l2_error_against(space, z.tail(N), exact_s);
  return std::sqrt(er * er + es * es);
}

}  // namespace hrom

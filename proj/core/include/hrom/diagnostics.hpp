#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hrom/sipg.hpp"

namespace hrom {

/// Progressive plane wave psi = A exp(i(c1 x + c2 y - omega t)).
struct PlaneWave {
  double amplitude = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double omega = 0.0;
};

/// Frequency that makes the plane wave an exact solution of the equation with
/// V = 0 (direct substitution): omega = alpha (c1^2 + c2^2) + beta |A|^2.
double plane_wave_frequency(double alpha, double beta, double amplitude,
                            double c1, double c2);

std::complex<double> plane_wave_value(const PlaneWave& wave, double t, double x,
                                      double y);

/// True when the wave is periodic on a box whose sides are integer multiples
/// of the wavelengths (integer wave numbers on a 2*pi box).
bool plane_wave_periodic_on(const PlaneWave& wave, double width, double height);

/// Stacked coefficient state [r; s] of the L2-projected wave at time t.
Eigen::VectorXd plane_wave_state(const DgSpace& space, const MassMatrix& mass,
                                 const PlaneWave& wave, double t);

/// Gaussian pi^{-1/2} exp(-(x^2+y^2)/2) as a stacked state (imaginary part 0).
Eigen::VectorXd gaussian_state(const DgSpace& space, const MassMatrix& mass);

/// N_h = r^T M r + s^T M s.
double discrete_mass(const MassMatrix& mass, const Eigen::VectorXd& z);

/// E_h = 1/2 r^T A r + 1/2 s^T A s + beta/4 * ||r_h^2 + s_h^2||^2.
double discrete_energy(const OperatorSet& ops, const Eigen::VectorXd& z);

/// Per-step invariant records of a run.
struct InvariantSeries {
  std::vector<double> time;
  std::vector<double> mass;
  std::vector<double> energy;
  std::vector<double> l2_error;  // empty when no exact reference exists

  double mass_drift() const;    // max_n |mass_n - mass_0|
  double energy_drift() const;  // max_n |energy_n - energy_0|
  void append(double t, double m, double e);
};

/// Relative L2-L2 error of a trajectory against an aligned reference,
/// sqrt(sum_n ||z_n - ref_n||_M^2) / sqrt(sum_n ||ref_n||_M^2).
double relative_l2l2_error(const Eigen::MatrixXd& states,
                           const Eigen::MatrixXd& reference,
                           const MassMatrix& mass);

/// L2 norm of (psi_h - psi_exact) at one time, both components.
double solution_l2_error(const DgSpace& space, const Eigen::VectorXd& z,
                         const ScalarField& exact_r, const ScalarField& exact_s);

}  // namespace hrom

#pragma once

// First-order asymptotics for the piecewise-linear oscillator
//
//   q'' + omega^2 q = eps omega^2 theta(q) q,
//
// with q = A cos(phi) + eps q1(phi), phi = omega (1 + eps gamma1) t.
// The first-order problem q1'' + q1 = A cos(phi) [2 gamma1 + m(cos phi)] is
// solved two ways: in nonsmooth time (q1 = X(tau) + Y(tau) e with
// tau = tau(2 phi / pi)) and as a Fourier series in phi.

#include "nonsmooth/algebra.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace nonsmooth {

/// Frequency correction from the Y boundary-value problem
///   (2/pi)^2 Y'' + Y = (w.real + 2 gamma) A cos(pi tau / 2),  Y(+-1) = 0,
/// where the detuning multiplier is m(cos phi) = w.real + w.mirror e.
/// The boundary residual Y(1) is affine in gamma; its root is returned.
double solvability_gamma(HyperbolicValue multiplier);

/// gamma1 for m = theta(cos phi) = (1 + e)/2, i.e. -1/4.
double solvability_gamma1();

/// Independent route: eliminate the resonant cos(phi) component by
/// quadrature, gamma = -<m(cos phi) cos phi, cos phi> / (2 <cos phi, cos phi>).
double resonance_gamma(const std::function<double(double)>& multiplier);

/// The X/Y pair solving the first-order problem. X satisfies
/// X'(+-1) = 0; the sin(pi tau/2) homogeneous part is fixed to zero, which
/// is the phase normalisation qdot(0) = 0.
class XYSolution {
public:
    XYSolution(double amplitude, HyperbolicValue multiplier);

    double amplitude() const { return a_; }
    double gamma() const { return gamma_; }

    double x(double tau) const;
    double dx(double tau) const;
    double d2x(double tau) const;

    /// Y(tau) evaluated at a trial gamma. Throws nonsmooth::Error unless the
    /// trial value satisfies the solvability condition (the BVP has no
    /// solution otherwise); at the solvable gamma Y is identically 0.
    double y(double tau, double trial_gamma) const;

private:
    double a_;
    double wx_;
    double wy_;
    double gamma_;
};

/// Pair for the pwl oscillator: X = (A/8)(2 cos(pi tau/2) + pi tau sin(pi tau/2)).
XYSolution xy_bvp_solutions(double amplitude);

/// q = A[cos phi + (eps/8)(2 cos(pi tau/2) + pi tau sin(pi tau/2))],
/// phi = omega (1 - eps/4) t, tau = tau(2 phi / pi).
double nstt_first_order(double amplitude, double eps, double omega, double t);

/// Second time derivative of nstt_first_order, analytic. The tau corners
/// contribute nothing because dX/dtau vanishes there.
double nstt_first_order_acceleration(double amplitude, double eps, double omega,
                                     double t);

/// Residual q'' + omega^2 q - eps omega^2 theta(q) q of the closed form.
double nstt_residual(double amplitude, double eps, double omega, double t);

/// Coefficient b_m of cos(2 m phi) in q1 = (A/pi)(b_0 + sum b_m cos 2 m phi),
/// m = 0..n_terms, obtained by quadrature of the Fourier integrals of
/// theta(cos phi) cos phi. b_0 = 1, b_1 = -2/9, b_2 = 2/225.
std::vector<double> pl_coefficients(std::size_t n_terms);

/// Truncated Poincare-Lindstedt series with n_terms harmonics.
class PoincareLindstedt {
public:
    explicit PoincareLindstedt(std::size_t n_terms);

    const std::vector<double>& coefficients() const { return b_; }

    double q(double amplitude, double eps, double omega, double t) const;
    double acceleration(double amplitude, double eps, double omega,
                        double t) const;

    /// PL amplitude reproducing the NSTT value q(0) obtained with amplitude 1.
    double matched_amplitude(double eps) const;

private:
    std::vector<double> b_;
};

/// One-shot evaluation; recomputes the coefficients on each call.
double pl_fourier_solution(double amplitude, double eps, double omega, double t,
                           std::size_t n_terms);

}  // namespace nonsmooth

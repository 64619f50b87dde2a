#include "nonsmooth/asymptotics.hpp"

#include "nonsmooth/types.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nonsmooth {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double half_pi = pi / 2.0;

using boost::math::quadrature::gauss_kronrod;

double integrate(const std::function<double(double)>& f, double a, double b) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 8, 1e-13);
}

// Y(z) = C1 cos z + C2 sin z + (c A / 2) z sin z solves Y'' + Y = c A cos z in
// z = pi tau / 2. The left condition Y(-pi/2) = 0 fixes C2; C1 multiplies
// cos z, which vanishes at both ends, so Y(pi/2) depends only on c.
double y_boundary_residual(double c, double amplitude) {
    auto particular = [&](double z) { return 0.5 * c * amplitude * z * std::sin(z); };
    const double c2 = -particular(-half_pi) / std::sin(-half_pi);
    return c2 * std::sin(half_pi) + particular(half_pi);
}

const XYSolution& unit_pwl_pair() {
    static const XYSolution pair(1.0, HyperbolicValue{0.5, 0.5});
    return pair;
}

double nstt_phase_rate(double eps, double omega) {
    return omega * (1.0 + eps * solvability_gamma1());
}

}  // namespace

double solvability_gamma(HyperbolicValue multiplier) {
    // Affine in gamma through c = w.real + 2 gamma.
    const double r0 = y_boundary_residual(multiplier.real, 1.0);
    const double r1 = y_boundary_residual(multiplier.real + 2.0, 1.0);
    if (r1 == r0) throw Error("Y boundary residual does not depend on gamma");
    return -r0 / (r1 - r0);
}

double solvability_gamma1() { return solvability_gamma(HyperbolicValue{0.5, 0.5}); }

double resonance_gamma(const std::function<double(double)>& multiplier) {
    // m(cos phi) jumps where cos phi changes sign; split there.
    auto f = [&](double phi) {
        const double c = std::cos(phi);
        return multiplier(c) * c * c;
    };
    const double projection = integrate(f, -half_pi, half_pi) +
                              integrate(f, half_pi, 3.0 * half_pi);
    const double norm = integrate([](double phi) {
        const double c = std::cos(phi);
        return c * c;
    }, -half_pi, 3.0 * half_pi);
    return -projection / (2.0 * norm);
}

XYSolution::XYSolution(double amplitude, HyperbolicValue multiplier)
    : a_(amplitude),
      wx_(multiplier.real),
      wy_(multiplier.mirror),
      gamma_(solvability_gamma(multiplier)) {
    if (!(amplitude > 0.0)) throw std::invalid_argument("amplitude must be positive");
}

// X(z) = C1 cos z + (w_y A / 2) z sin z with X'(+-pi/2) = 0, giving
// C1 = w_y A / 2. Derivatives in tau carry a factor pi/2 per order.
double XYSolution::x(double tau) const {
    const double z = half_pi * tau;
    const double h = 0.5 * wy_ * a_;
    return h * (std::cos(z) + z * std::sin(z));
}

double XYSolution::dx(double tau) const {
    const double z = half_pi * tau;
    const double h = 0.5 * wy_ * a_;
    return half_pi * h * z * std::cos(z);
}

double XYSolution::d2x(double tau) const {
    const double z = half_pi * tau;
    const double h = 0.5 * wy_ * a_;
    return half_pi * half_pi * h * (std::cos(z) - z * std::sin(z));
}

double XYSolution::y(double, double trial_gamma) const {
    const double residual = y_boundary_residual(wx_ + 2.0 * trial_gamma, a_);
    if (std::abs(residual) > 1e-12 * a_) {
        throw Error("Y boundary-value problem has no solution for this gamma");
    }
    return 0.0;
}

XYSolution xy_bvp_solutions(double amplitude) {
    return XYSolution(amplitude, HyperbolicValue{0.5, 0.5});
}

double nstt_first_order(double amplitude, double eps, double omega, double t) {
    if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
    const double phi = nstt_phase_rate(eps, omega) * t;
    const double tau = triangular_wave(2.0 * phi / pi);
    return amplitude * (std::cos(phi) + eps * unit_pwl_pair().x(tau));
}

double nstt_first_order_acceleration(double amplitude, double eps, double omega,
                                     double t) {
    if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
    const double rate = nstt_phase_rate(eps, omega);
    const double phi = rate * t;
    const double tau = triangular_wave(2.0 * phi / pi);
    const double scale = 2.0 / pi;
    const double q1_phiphi = scale * scale * unit_pwl_pair().d2x(tau);
    return rate * rate * amplitude * (-std::cos(phi) + eps * q1_phiphi);
}

double nstt_residual(double amplitude, double eps, double omega, double t) {
    const double q = nstt_first_order(amplitude, eps, omega, t);
    const double w2 = omega * omega;
    return nstt_first_order_acceleration(amplitude, eps, omega, t) + w2 * q -
           eps * w2 * heaviside(q) * q;
}

std::vector<double> pl_coefficients(std::size_t n_terms) {
    // theta(cos phi) cos phi has Fourier cosine coefficients
    // c_n = (1/pi) int_{-pi/2}^{pi/2} cos phi cos n phi dphi (smooth there).
    // A forcing term A c_n cos(n phi) produces A c_n / (1 - n^2) cos(n phi).
    std::vector<double> b(n_terms + 1);
    b[0] = 0.5 * integrate([](double phi) { return std::cos(phi); }, -half_pi, half_pi);
    for (std::size_t m = 1; m <= n_terms; ++m) {
        const double n = 2.0 * static_cast<double>(m);
        const double cn = integrate([n](double phi) {
            return std::cos(phi) * std::cos(n * phi);
        }, -half_pi, half_pi) / pi;
        b[m] = pi * cn / (1.0 - n * n);
    }
    return b;
}

PoincareLindstedt::PoincareLindstedt(std::size_t n_terms) {
    if (n_terms < 1) throw std::invalid_argument("PL series needs n_terms >= 1");
    b_ = pl_coefficients(n_terms);
}

double PoincareLindstedt::q(double amplitude, double eps, double omega,
                            double t) const {
    const double phi = nstt_phase_rate(eps, omega) * t;
    double series = 0.0;
    for (std::size_t m = 0; m < b_.size(); ++m) {
        series += b_[m] * std::cos(2.0 * static_cast<double>(m) * phi);
    }
    return amplitude * (std::cos(phi) + eps / pi * series);
}

double PoincareLindstedt::acceleration(double amplitude, double eps,
                                       double omega, double t) const {
    const double rate = nstt_phase_rate(eps, omega);
    const double phi = rate * t;
    double series = 0.0;
    for (std::size_t m = 1; m < b_.size(); ++m) {
        const double n = 2.0 * static_cast<double>(m);
        series -= n * n * b_[m] * std::cos(n * phi);
    }
    return rate * rate * amplitude * (-std::cos(phi) + eps / pi * series);
}

double PoincareLindstedt::matched_amplitude(double eps) const {
    double sum = 0.0;
    for (double bm : b_) sum += bm;
    return nstt_first_order(1.0, eps, 1.0, 0.0) / (1.0 + eps / pi * sum);
}

double pl_fourier_solution(double amplitude, double eps, double omega, double t,
                           std::size_t n_terms) {
    return PoincareLindstedt(n_terms).q(amplitude, eps, omega, t);
}

}  // namespace nonsmooth

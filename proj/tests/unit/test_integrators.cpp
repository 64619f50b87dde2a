#include "nonsmooth/integrators.hpp"

#include "nonsmooth/algebra.hpp"
#include "nonsmooth/models.hpp"
#include "nonsmooth/transforms.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace nonsmooth;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

const Rhs harmonic = [](double, std::span<const double> x,
                        std::span<double> dx) {
    dx[0] = x[1];
    dx[1] = -x[0];
};

std::vector<Guard> floor_guard(double kappa) {
    return {Guard{[](std::span<const double> x) { return x[0]; }, 1, kappa}};
}

}  // namespace

TEST_CASE("exponential decay") {
    const Rhs decay = [](double, std::span<const double> x,
                         std::span<double> dx) { dx[0] = -x[0]; };
    IntegratorConfig cfg;
    const auto traj = integrate_smooth(decay, {1.0}, {0.0, 1.0}, cfg);
    CHECK(traj.back().t == 1.0);
    CHECK(std::abs(traj.back().x[0] - std::exp(-1.0)) <=
          cfg.rel_tol * std::exp(-1.0));
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        CHECK(traj.samples[i].t > traj.samples[i - 1].t);
    }
}

TEST_CASE("harmonic oscillator returns after one period") {
    IntegratorConfig cfg;
    const auto traj = integrate_smooth(harmonic, {1.0, 0.0}, {0.0, 2 * pi}, cfg);
    CHECK(std::abs(traj.back().x[0] - 1.0) <= 10 * cfg.rel_tol);
    CHECK(std::abs(traj.back().x[1]) <= 10 * cfg.rel_tol);
}

TEST_CASE("output times are landed exactly") {
    IntegratorConfig cfg;
    const std::vector<double> grid{0.1, 0.25, 1.0 / 3.0, 2.0};
    const auto traj =
        integrate_smooth(harmonic, {1.0, 0.0}, {0.0, 3.0}, cfg, {}, grid);
    for (double t : grid) {
        CHECK(traj.at(t).x[0] == Approx(std::cos(t)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(traj.at(0.2), Error);
}

TEST_CASE("fixed-step RK4 converges at fourth order") {
    const Rhs decay = [](double, std::span<const double> x,
                         std::span<double> dx) { dx[0] = -x[0]; };
    const double e1 =
        std::abs(integrate_fixed_rk4(decay, {1.0}, {0.0, 1.0}, 20).back().x[0] -
                 std::exp(-1.0));
    const double e2 =
        std::abs(integrate_fixed_rk4(decay, {1.0}, {0.0, 1.0}, 40).back().x[0] -
                 std::exp(-1.0));
    CHECK(std::log2(e1 / e2) == Approx(4.0).epsilon(0.05));
    CHECK_THROWS_AS(integrate_fixed_rk4(decay, {1.0}, {0.0, 1.0}, 0),
                    std::invalid_argument);
}

TEST_CASE("config validation") {
    IntegratorConfig cfg;
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate_smooth(harmonic, {1, 0}, {0, 1}, cfg),
                    std::invalid_argument);
    cfg = {};
    cfg.max_step = 1e-3;
    cfg.event_tol = 1e-2;
    CHECK_THROWS_AS(integrate_smooth(harmonic, {1, 0}, {0, 1}, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate_smooth(harmonic, {1, 0}, {1, 1}, IntegratorConfig{}),
                    std::invalid_argument);
}

TEST_CASE("non-finite state aborts") {
    const Rhs blowup = [](double, std::span<const double> x,
                          std::span<double> dx) { dx[0] = x[0] * x[0]; };
    CHECK_THROWS_AS(integrate_smooth(blowup, {1.0}, {0.0, 2.0}, IntegratorConfig{}),
                    IntegrationError);
}

TEST_CASE("elastic Ivanov field folds to the harmonic solution") {
    const Force force = [](double x1, double, double) { return x1; };
    IntegratorConfig cfg;
    const auto surfaces = ivanov_surfaces();
    const auto traj = integrate_smooth(make_ivanov_rhs(force, 0.0), {1.0, 0.0},
                                       {0.0, 3.0}, cfg, surfaces);
    REQUIRE(!traj.crossings.empty());
    const auto& first_s = *std::find_if(
        traj.crossings.begin(), traj.crossings.end(),
        [](const SurfaceCrossing& c) { return c.surface_index == 0; });
    CHECK(first_s.t_before == Approx(pi / 2).epsilon(1e-10));
    for (const auto& s : traj.samples) {
        CHECK(std::abs(std::abs(s.x[0]) - std::abs(std::cos(s.t))) <= 1e-8);
    }
}

TEST_CASE("no accepted step straddles a declared surface") {
    const Force force = [](double x1, double, double) { return x1; };
    IntegratorConfig cfg;
    const auto surfaces = ivanov_surfaces();
    const double k = restitution_to_k(0.5);
    const auto traj = integrate_smooth(make_ivanov_rhs(force, k), {1.0, 0.0},
                                       {0.0, 12.0}, cfg, surfaces);
    const double tol = cfg.resolved_event_tol(12.0);
    std::size_t straddles = 0;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const auto& a = traj.samples[i - 1];
        const auto& b = traj.samples[i];
        for (std::size_t c = 0; c < 2; ++c) {
            if (a.x[c] * b.x[c] < 0.0) {
                ++straddles;
                CHECK(b.t - a.t <= tol * 1.0000001);
            }
        }
    }
    CHECK(straddles == traj.crossings.size());
}

TEST_CASE("oracle: first impact of the inelastic harmonic oscillator") {
    IntegratorConfig cfg;
    const auto guards = floor_guard(0.5);
    const auto traj =
        integrate_event_driven(harmonic, guards, {1.0, 0.0}, {0.0, 10.0}, cfg);
    REQUIRE(traj.events.size() >= 3);
    CHECK(traj.events[0].t_star == Approx(pi / 2).epsilon(1e-10));
    CHECK(traj.events[0].v_pre == Approx(-1.0).epsilon(1e-9));
    CHECK(traj.events[0].v_post == Approx(0.5).epsilon(1e-9));
    CHECK_FALSE(traj.events[0].grazing);
    // Each free arc is a half period and both pre-impact velocities point
    // downward, so consecutive v_pre keep their sign and shrink by kappa.
    for (std::size_t i = 1; i < traj.events.size(); ++i) {
        const auto& prev = traj.events[i - 1];
        const auto& ev = traj.events[i];
        CHECK(ev.v_pre / prev.v_pre == Approx(0.5).epsilon(1e-8));
        CHECK(ev.t_star - prev.t_star == Approx(pi).epsilon(1e-9));
        CHECK(ev.v_post == Approx(-ev.kappa * ev.v_pre).epsilon(1e-15));
    }
    // Event location: residual guard value bounded by event_tol * |g'|.
    const double tol = cfg.resolved_event_tol(10.0);
    for (const auto& ev : traj.events) {
        const auto& s = traj.at(ev.t_star);
        CHECK(std::abs(s.x[0]) <= 10 * tol * std::abs(ev.v_pre) + 1e-12);
    }
}

TEST_CASE("oracle: elastic impacts conserve energy") {
    IntegratorConfig cfg;
    const auto guards = floor_guard(1.0);
    const auto traj =
        integrate_event_driven(harmonic, guards, {0.3, 0.8}, {0.0, 20.0}, cfg);
    const double e0 = 0.5 * (0.3 * 0.3 + 0.8 * 0.8);
    CHECK(traj.events.size() >= 5);
    for (const auto& s : traj.samples) {
        const double e = 0.5 * (s.x[0] * s.x[0] + s.x[1] * s.x[1]);
        CHECK(std::abs(e - e0) <= 10 * cfg.rel_tol * e0 + 1e-12);
        CHECK(s.x[0] >= -1e-10);
    }
}

TEST_CASE("oracle: scheduled impulses jump exactly at their instants") {
    const Rhs still = [](double, std::span<const double>, std::span<double> dx) {
        dx[0] = 0.0;
    };
    const ImpulseTrain train = make_scalar_impulse_train({1.0, 2.5}, {2.0, -0.5}, 1, 0);
    const auto traj = integrate_event_driven(still, {}, {0.0}, {0.0, 4.0},
                                             IntegratorConfig{}, &train);
    REQUIRE(traj.jumps.size() == 2);
    CHECK(traj.jumps[0].before[0] == 0.0);
    CHECK(traj.jumps[0].after[0] == 2.0);
    CHECK(traj.at(1.0).x[0] == 2.0);
    CHECK(traj.at(2.5).x[0] == 1.5);
    CHECK(traj.back().x[0] == 1.5);
}

TEST_CASE("oracle: grazing contact is flagged, not fatal") {
    const Rhs free_flight = [](double, std::span<const double> x,
                               std::span<double> dx) {
        dx[0] = x[1];
        dx[1] = 0.0;
    };
    const auto guards = floor_guard(1.0);
    const auto traj = integrate_event_driven(free_flight, guards, {1e-6, -1e-9},
                                             {0.0, 2000.0}, IntegratorConfig{});
    REQUIRE(traj.events.size() == 1);
    CHECK(traj.events[0].grazing);
    CHECK(traj.events[0].t_star == Approx(1000.0).epsilon(1e-6));
}

TEST_CASE("oracle: Zeno bouncing aborts with a diagnostic") {
    const Rhs gravity = [](double, std::span<const double> x,
                           std::span<double> dx) {
        dx[0] = x[1];
        dx[1] = -1.0;
    };
    const auto guards = floor_guard(0.5);
    CHECK_THROWS_AS(integrate_event_driven(gravity, guards, {1.0, 0.0},
                                           {0.0, 10.0}, IntegratorConfig{}),
                    IntegrationError);
}

TEST_CASE("oracle rejects infeasible starts") {
    const auto guards = floor_guard(1.0);
    CHECK_THROWS_AS(integrate_event_driven(harmonic, guards, {-0.1, 0.0},
                                           {0.0, 1.0}, IntegratorConfig{}),
                    std::invalid_argument);
}

TEST_CASE("smoothed delta family") {
    using boost::math::quadrature::gauss_kronrod;
    for (double eps : {1.0, 0.1, 0.01}) {
        const double w = eps * eps;
        auto delta = [eps](double t) { return smoothed_delta(t, 1.0, eps); };
        auto work = [eps](double t) {
            return smoothed_step(t, 1.0, eps) * smoothed_delta(t, 1.0, eps);
        };
        const double lo = 1.0 - 60 * w, hi = 1.0 + 60 * w;
        CHECK(gauss_kronrod<double, 61>::integrate(delta, lo, hi, 15, 1e-14) ==
              Approx(1.0).epsilon(1e-12));
        CHECK(gauss_kronrod<double, 61>::integrate(work, lo, hi, 15, 1e-14) ==
              Approx(0.5).epsilon(1e-12));
        CHECK(smoothed_step(1.0, 1.0, eps) == 0.5);
        // Antiderivative: central difference of the step equals the delta.
        for (double t : {1.0 - w, 1.0, 1.0 + 0.3 * w}) {
            const double h = 1e-4 * w;
            const double fd = (smoothed_step(t + h, 1.0, eps) -
                               smoothed_step(t - h, 1.0, eps)) / (2 * h);
            CHECK(fd == Approx(smoothed_delta(t, 1.0, eps)).epsilon(1e-6));
        }
    }
    CHECK(smoothed_step(-1e9, 0.0, 0.1) == 0.0);
    CHECK(smoothed_step(1e9, 0.0, 0.1) == 1.0);
    CHECK(smoothed_delta(1e9, 0.0, 0.1) == 0.0);
    CHECK_THROWS_AS(smoothed_delta(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(smoothed_step(0.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("every recorded crossing straddles its surface") {
    // Dense output stops used to leave the re-based hop on the near side.
    const auto rhs = inelastic_oscillator_ivanov_rhs(1.0, 0.5);
    std::vector<double> grid;
    for (int i = 1; 0.05 * i < 5 * std::numbers::pi; ++i) grid.push_back(0.05 * i);
    const auto surfaces = ivanov_surfaces();
    const auto traj = integrate_smooth(rhs, {1.0, 0.0}, {0.0, 5 * std::numbers::pi},
                                       IntegratorConfig{}, surfaces, grid);
    std::size_t impacts = 0;
    for (const auto& c : traj.crossings) {
        const auto& g = surfaces[c.surface_index];
        CHECK(g(c.t_before, c.before) * g(c.t_after, c.after) <= 0.0);
        impacts += c.surface_index == 0;
    }
    CHECK(impacts == 5);
}

#include "nonsmooth/algebra.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <numbers>
#include <random>
#include <vector>

using namespace nonsmooth;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

double rel_err(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("triangular wave branches and periodicity") {
    CHECK(triangular_wave(0.5) == 0.5);
    CHECK(triangular_wave(2.0) == 0.0);
    CHECK(triangular_wave(7.0) == -1.0);
    CHECK(triangular_wave(-3.0) == 1.0);
    CHECK(triangular_wave(1.0) == 1.0);
    CHECK(triangular_wave(-1.0) == -1.0);
    CHECK(triangular_wave(2.5) == -0.5);
}

TEST_CASE("triangular wave rejects non-finite input") {
    CHECK_THROWS_AS(triangular_wave(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(triangular_wave(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(triangular_derivative(std::nan("")),
                    std::invalid_argument);
}

TEST_CASE("triangular derivative with corner convention") {
    CHECK(triangular_derivative(0.5) == 1.0);
    CHECK(triangular_derivative(1.5) == -1.0);
    CHECK(triangular_derivative(1.0) == 0.0);
    CHECK(triangular_derivative(-1.0) == 0.0);
    CHECK(triangular_derivative(3.0) == 0.0);
    CHECK(triangular_derivative(-5.0) == 0.0);
    CHECK(triangular_derivative(3.5) == 1.0);
    CHECK(is_triangular_corner(7.0));
    CHECK_FALSE(is_triangular_corner(6.0));
}

TEST_CASE("triangular wave property: period 4, bounded, unit slope") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = dist(rng);
        const double tau = triangular_wave(x);
        CHECK(std::abs(tau) <= 1.0);
        CHECK(std::abs(triangular_wave(x + 4.0) - tau) <= 1e-13);
        // arcsin(sin) closed form of the same wave.
        CHECK(std::abs(tau - 2.0 / pi * std::asin(std::sin(pi * x / 2.0))) <=
              1e-9);
        if (!is_triangular_corner(x)) {
            const double e = triangular_derivative(x);
            CHECK(e * e == 1.0);
            const double h = 1e-7;
            if (!is_triangular_corner(x + h) && !is_triangular_corner(x - h) &&
                triangular_derivative(x + h) == e &&
                triangular_derivative(x - h) == e) {
                const double fd = (triangular_wave(x + h) -
                                   triangular_wave(x - h)) / (2 * h);
                CHECK(fd == Approx(e).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("ramp saturates on both sides") {
    CHECK(ramp(0.5, 1.0) == 0.5);
    CHECK(ramp(-1.0, 1.0) == 0.0);
    CHECK(ramp(3.0, 1.0) == 1.0);
    CHECK_THROWS_AS(ramp(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ramp(0.5, -2.0), std::invalid_argument);
}

TEST_CASE("positive time") {
    auto p = positive_time(3.0, 2.0);
    CHECK(p.s == 1.0);
    CHECK(p.direction == 1.0);
    p = positive_time(1.0, 2.0);
    CHECK(p.s == 1.0);
    CHECK(p.direction == -1.0);
    p = positive_time(2.0, 2.0);
    CHECK(p.s == 0.0);
    CHECK(p.direction == 0.0);
    CHECK(p.reconstruct(2.0) == 2.0);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        const double t = dist(rng), a = dist(rng);
        if (t == a) continue;
        // One rounding in t - a, one in the sum.
        CHECK(rel_err(positive_time(t, a).reconstruct(a), t) <= 1e-15);
    }
}

TEST_CASE("hyperbolic multiplication") {
    CHECK(hyp_mul({2, 3}, {1, 1}) == HyperbolicValue{5, 5});
    CHECK(hyp_mul({-1.5, 4}, {1, 0}) == HyperbolicValue{-1.5, 4});
    CHECK(hyp_mul({1, 1}, {1, -1}) == HyperbolicValue{0, 0});
    // j^2 = 1
    CHECK(hyp_mul({0, 1}, {0, 1}) == HyperbolicValue{1, 0});
    CHECK(HyperbolicValue{3, 4}.modulus() == Approx(std::sqrt(7.0)));
    CHECK(HyperbolicValue{3, 4}.conjugate() == HyperbolicValue{3, -4});
}

TEST_CASE("hyperbolic algebra laws on random values") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    auto draw = [&] { return HyperbolicValue{dist(rng), dist(rng)}; };
    auto close = [](HyperbolicValue a, HyperbolicValue b, double scale) {
        return std::abs(a.real - b.real) <= 1e-14 * scale &&
               std::abs(a.mirror - b.mirror) <= 1e-14 * scale;
    };
    for (int i = 0; i < 1000; ++i) {
        const auto u = draw(), v = draw(), w = draw();
        const double scale =
            (std::abs(u.real) + std::abs(u.mirror) + 1) *
            (std::abs(v.real) + std::abs(v.mirror) + 1) *
            (std::abs(w.real) + std::abs(w.mirror) + 1);
        CHECK(hyp_mul(u, v) == hyp_mul(v, u));
        CHECK(close(hyp_mul(hyp_mul(u, v), w), hyp_mul(u, hyp_mul(v, w)),
                    scale));
        CHECK(close(hyp_mul(u, v + w), hyp_mul(u, v) + hyp_mul(u, w), scale));
        // Modulus is multiplicative: |uv|_h = |u|_h |v|_h.
        const double m = hyp_mul(u, v).modulus();
        CHECK(m == Approx(u.modulus() * v.modulus()).epsilon(1e-10).scale(
                       scale));
    }
}

TEST_CASE("idempotent basis") {
    CHECK(to_idempotent({3, 1}) == IdempotentPair{4, 2});
    // t = a + s sdot -> (a+s, a-s)
    const double a = 1.25, s = 0.5;
    CHECK(to_idempotent(positive_time(a + s, a).as_hyperbolic(a)) ==
          IdempotentPair{a + s, a - s});
    const IdempotentPair p{2, 3};
    const HyperbolicValue sq = from_idempotent(p * p);
    CHECK(sq == HyperbolicValue{6.5, -2.5});
    CHECK(sq == hyp_mul(from_idempotent(p), from_idempotent(p)));
}

TEST_CASE("idempotent round trip is exact on a dyadic grid") {
    // Sums and halves of values with at most 41 significant bits at a shared
    // exponent are exact in binary64.
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::int64_t> dist(-(1LL << 40), 1LL << 40);
    for (int i = 0; i < 1000; ++i) {
        const HyperbolicValue u{std::ldexp(double(dist(rng)), -20),
                                std::ldexp(double(dist(rng)), -20)};
        CHECK(from_idempotent(to_idempotent(u)) == u);
        const IdempotentPair p{std::ldexp(double(dist(rng)), -20),
                               std::ldexp(double(dist(rng)), -20)};
        CHECK(to_idempotent(from_idempotent(p)) == p);
    }
}

TEST_CASE("idempotent functional linearity matches the turn decomposition") {
    auto f = [](double t) { return std::exp(0.3 * t) + t * t * t; };
    const double a = 0.7, s = 1.3;
    const IdempotentPair mapped =
        apply_componentwise(f, to_idempotent({a, s}));
    const HyperbolicValue xy = decompose_at_turn(f, a, s);
    const HyperbolicValue back = from_idempotent(mapped);
    CHECK(back.real == Approx(xy.real).epsilon(1e-15));
    CHECK(back.mirror == Approx(xy.mirror).epsilon(1e-15));
}

TEST_CASE("decomposition at a turning point") {
    auto sq = [](double t) { return t * t; };
    auto d = decompose_at_turn(sq, 1.0, 0.5);
    CHECK(d.real == Approx(1.25));
    CHECK(d.mirror == Approx(1.0));
    d = decompose_at_turn([](double) { return 3.5; }, 2.0, 0.7);
    CHECK(d == HyperbolicValue{3.5, 0.0});
    d = decompose_at_turn([](double t) { return t; }, 0.0, 2.0);
    CHECK(d == HyperbolicValue{0.0, 2.0});
}

TEST_CASE("turn decomposition reconstructs random polynomials") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(0, 6);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> c(static_cast<std::size_t>(deg(rng)) + 1);
        for (double& ci : c) ci = coef(rng);
        auto f = [&c](double t) {
            double r = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * t + *it;
            return r;
        };
        const double a = pos(rng), s = std::abs(pos(rng));
        const HyperbolicValue xy = decompose_at_turn(f, a, s);
        CHECK(std::abs(xy.evaluate(+1.0) - f(a + s)) <= 1e-12);
        CHECK(std::abs(xy.evaluate(-1.0) - f(a - s)) <= 1e-12);
    }
}

TEST_CASE("periodic decomposition") {
    auto sine = [](double t) { return std::sin(pi * t / 2.0); };
    auto d = decompose_periodic(sine, 0.5);
    CHECK(d.real == Approx(std::sin(pi * 0.25)));
    CHECK(d.mirror == Approx(0.0).epsilon(1e-15).scale(1.0));

    auto cosine = [](double t) { return std::cos(pi * t / 2.0); };
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const double t = dist(rng);
        if (is_triangular_corner(t)) continue;
        const double tau = triangular_wave(t);
        const double e = triangular_derivative(t);
        d = decompose_periodic(cosine, t);
        CHECK(std::abs(d.real) <= 1e-15);
        CHECK(d.mirror == Approx(std::cos(pi * tau / 2.0)));
        CHECK(d.evaluate(e) == Approx(cosine(t)).epsilon(1e-12).scale(1.0));
        // theta(cos phi) = (1 + e)/2 with phi = pi t / 2.
        CHECK(heaviside(cosine(t)) == 0.5 * (1.0 + e));
        // Generic periodic signal.
        auto g = [](double x) {
            return 0.3 + std::sin(pi * x / 2.0) + 0.2 * std::cos(pi * x);
        };
        CHECK(decompose_periodic(g, t).evaluate(e) ==
              Approx(g(t)).epsilon(1e-12));
    }
    d = decompose_periodic([](double) { return -2.0; }, 9.3);
    CHECK(d == HyperbolicValue{-2.0, 0.0});
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ganlab/losses.hpp"

using namespace ganlab;

namespace {

void require_close(double got, double want, double tol) {
    CAPTURE(got, want, tol);
    if (std::isinf(got) || std::isinf(want)) {
        REQUIRE(got == want);
        return;
    }
    REQUIRE(std::abs(got - want) <= tol);
}

}  // namespace

TEST_CASE("alpha_loss closed forms", "[losses]") {
    require_close(alpha_loss(1.0, 1, 0.5), std::log(2.0), 1e-15);
    require_close(alpha_loss(1.0, 0, 0.5), std::log(2.0), 1e-15);
    require_close(alpha_loss(kInf, 1, 0.25), 0.75, 1e-15);
    require_close(alpha_loss(kInf, 0, 0.25), 0.25, 1e-15);
    // alpha=2, y=1, yhat=0.25: 2 (1 - 0.5) = 1
    require_close(alpha_loss(2.0, 1, 0.25), 1.0, 1e-15);
    // alpha=1/2, y=1: -(1 - yhat^-1); yhat=0.5 -> 1
    require_close(alpha_loss(0.5, 1, 0.5), 1.0, 1e-15);
}

TEST_CASE("alpha_loss label symmetry", "[losses]") {
    for (double alpha : {0.3, 0.5, 1.0, 2.0, 5.0, kInf})
        for (int i = 0; i <= 10; ++i) {
            const double t = i / 10.0;
            require_close(alpha_loss(alpha, 0, t), alpha_loss(alpha, 1, 1.0 - t), 1e-14);
        }
}

TEST_CASE("alpha_loss approaches the log loss as alpha -> 1", "[losses]") {
    for (double t : {0.1, 0.4, 0.9}) {
        require_close(alpha_loss(1.0 + 1e-9, 1, t), -std::log(t), 1e-7);
        require_close(alpha_loss(1.0 - 1e-9, 1, t), -std::log(t), 1e-7);
    }
}

TEST_CASE("alpha_loss tends to the 0-1 style loss as alpha -> inf", "[losses]") {
    for (double t : {0.1, 0.4, 0.9})
        require_close(alpha_loss(1e8, 1, t), 1.0 - t, 1e-6);
}

TEST_CASE("alpha_loss infinite values are values, not errors", "[losses]") {
    REQUIRE(alpha_loss(1.0, 1, 0.0) == kInf);
    REQUIRE(alpha_loss(0.5, 1, 0.0) == kInf);
    // alpha > 1 stays finite at phat = 0
    require_close(alpha_loss(2.0, 1, 0.0), 2.0, 1e-15);
}

TEST_CASE("alpha_loss rejects bad arguments", "[losses]") {
    REQUIRE_THROWS_AS(alpha_loss(0.0, 1, 0.5), std::domain_error);
    REQUIRE_THROWS_AS(alpha_loss(-1.0, 1, 0.5), std::domain_error);
    REQUIRE_THROWS_AS(alpha_loss(1.0, 1, -0.1), std::domain_error);
    REQUIRE_THROWS_AS(alpha_loss(1.0, 1, 1.1), std::domain_error);
}

TEST_CASE("alpha_loss_deriv matches the closed form and finite differences", "[losses]") {
    for (double alpha : {0.3, 0.5, 1.0, 2.0, 5.0, kInf})
        for (double t : {0.05, 0.3, 0.5, 0.7, 0.95}) {
            const double want1 = -std::pow(t, -1.0 / alpha);
            require_close(alpha_loss_deriv(alpha, 1, t), want1, 1e-14);
            const double want0 = std::pow(1.0 - t, -1.0 / alpha);
            require_close(alpha_loss_deriv(alpha, 0, t), want0, 1e-14);
            if (alpha != kInf) {
                const double h = 1e-6;
                const double fd =
                    (alpha_loss(alpha, 1, t + h) - alpha_loss(alpha, 1, t - h)) / (2.0 * h);
                require_close(alpha_loss_deriv(alpha, 1, t), fd, 1e-6 * (1.0 + std::abs(fd)));
            }
        }
    REQUIRE_THROWS_AS(alpha_loss_deriv(1.0, 1, 0.0), std::domain_error);
    REQUIRE_THROWS_AS(alpha_loss_deriv(1.0, 0, 1.0), std::domain_error);
}

TEST_CASE("make_loss wires phi and psi as negated partial losses", "[losses]") {
    const LossSpec a2 = make_loss(LossKind::alpha, 2.0);
    require_close(a2.phi(0.25), -alpha_loss(2.0, 1, 0.25), 1e-15);
    require_close(a2.psi(0.25), -alpha_loss(2.0, 0, 0.25), 1e-15);
    require_close(a2.dphi(0.25), -alpha_loss_deriv(2.0, 1, 0.25), 1e-15);
    require_close(a2.dpsi(0.25), -alpha_loss_deriv(2.0, 0, 0.25), 1e-15);
    REQUIRE(a2.kind == LossKind::alpha);
    REQUIRE(a2.alpha == 2.0);

    const LossSpec sq = make_loss(LossKind::square_disc);
    require_close(sq.phi(0.25), -0.5 * 0.75 * 0.75, 1e-15);
    require_close(sq.psi(0.25), -0.5 * 0.25 * 0.25, 1e-15);
    require_close(sq.dphi(0.25), 0.75, 1e-15);
    require_close(sq.dpsi(0.25), -0.25, 1e-15);

    const LossSpec ls = make_loss(LossKind::lsgan);
    require_close(ls.phi(0.3), sq.phi(0.3), 0.0);
    REQUIRE(ls.kind == LossKind::lsgan);

    REQUIRE_THROWS_AS(make_loss(LossKind::alpha), std::domain_error);
    REQUIRE_THROWS_AS(make_loss(LossKind::custom), std::domain_error);
}

TEST_CASE("empirical_value is the mean phi + mean psi", "[losses]") {
    const LossSpec l1 = make_loss(LossKind::alpha, 1.0);
    const std::vector<double> dr{0.8, 0.6};
    const std::vector<double> dg{0.3};
    const ValueEstimate est = empirical_value(l1, dr, dg);
    const double want = 0.5 * (std::log(0.8) + std::log(0.6)) + std::log(0.7);
    require_close(est.value, want, 1e-15);
    REQUIRE(est.n_real == 2);
    REQUIRE(est.n_gen == 1);

    REQUIRE_THROWS_AS(empirical_value(l1, {}, dg), std::invalid_argument);
    // phi(0) = -inf propagates
    REQUIRE(empirical_value(l1, {0.0}, dg).value == -kInf);
}

TEST_CASE("ns_generator_value averages the y=1 loss over generated outputs", "[losses]") {
    require_close(ns_generator_value(1.0, {0.5, 0.25}),
                  0.5 * (std::log(2.0) + std::log(4.0)), 1e-15);
    require_close(ns_generator_value(kInf, {0.5, 0.25}), 0.5 * (0.5 + 0.75), 1e-15);
    REQUIRE_THROWS_AS(ns_generator_value(1.0, {}), std::invalid_argument);
}

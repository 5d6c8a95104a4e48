#include "doctest.h"

#include <cmath>

#include "sncse/adamw.hpp"
#include "sncse/errors.hpp"
#include "sncse/rng.hpp"

using namespace sncse;
using namespace sncse::num;

TEST_CASE("zero gradient applies decoupled decay only") {
    AdamWConfig cfg;
    cfg.lr = 0.01;
    cfg.weight_decay = 0.1;
    AdamW opt(cfg);
    Tensor p = Tensor::row({1.0, -2.0, 0.5});
    Tensor p0 = p;
    Tensor zero = Tensor::zeros(1, 3);
    opt.step_begin();
    opt.update("w", p, zero);
    for (int j = 0; j < 3; ++j)
        CHECK(p.at(0, j) == doctest::Approx(p0.at(0, j) * (1.0 - cfg.lr * cfg.weight_decay))
                                .epsilon(1e-12));
}

TEST_CASE("first step with constant gradient moves by ~lr * sign(g)") {
    AdamWConfig cfg;
    cfg.lr = 0.05;
    cfg.weight_decay = 0.0;
    AdamW opt(cfg);
    Tensor p = Tensor::row({0.2, -0.3});
    Tensor g = Tensor::row({0.7, -1.3});
    Tensor p0 = p;
    opt.step_begin();
    opt.update("w", p, g);
    for (int j = 0; j < 2; ++j) {
        double gj = g.at(0, j);
        double expected = cfg.lr * gj / (std::abs(gj) + cfg.eps);
        CHECK(p0.at(0, j) - p.at(0, j) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("second step with identical gradient does not grow") {
    // Direct simulation oracle: replay the moment recursions by hand.
    AdamWConfig cfg;
    cfg.lr = 0.01;
    cfg.weight_decay = 0.0;
    AdamW opt(cfg);
    Tensor p = Tensor::row({1.0});
    Tensor g = Tensor::row({0.4});

    double m = 0.0, v = 0.0, pref = 1.0;
    double step1 = 0.0, step2 = 0.0;
    for (int t = 1; t <= 2; ++t) {
        m = cfg.beta1 * m + (1 - cfg.beta1) * 0.4;
        v = cfg.beta2 * v + (1 - cfg.beta2) * 0.16;
        double mhat = m / (1 - std::pow(cfg.beta1, t));
        double vhat = v / (1 - std::pow(cfg.beta2, t));
        double delta = cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        if (t == 1) step1 = delta; else step2 = delta;
        pref -= delta;
    }
    CHECK(std::abs(step2) <= std::abs(step1) + 1e-12);

    opt.step_begin();
    opt.update("w", p, g);
    opt.step_begin();
    opt.update("w", p, g);
    CHECK(p.item() == doctest::Approx(pref).epsilon(1e-12));
    CHECK(opt.step_count() == 2);
}

TEST_CASE("NaN gradients are rejected") {
    AdamW opt;
    Tensor p = Tensor::row({1.0});
    Tensor g = Tensor::row({std::nan("")});
    opt.step_begin();
    CHECK_THROWS_AS(opt.update("w", p, g), NumericError);
}

TEST_CASE("shape mismatch is rejected") {
    AdamW opt;
    Tensor p = Tensor::row({1.0, 2.0});
    Tensor g = Tensor::row({1.0});
    opt.step_begin();
    CHECK_THROWS_AS(opt.update("w", p, g), DimError);
}

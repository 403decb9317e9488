// SPDX-License-Identifier: Apache-2.0
//
// ofdm-phn: joint channel, phase noise and CFO estimation for OFDM receivers
// Copyright (C) 2026 The ofdm-phn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include "ofdm/ecm.hpp"
#include "ofdm/harness.hpp"
#include "ofdm/op_counter.hpp"

#include <algorithm>
#include <cmath>

using namespace ofdm;

namespace
{
    struct Fixture
    {
        SimConfig cfg;
        DftOperators ops{64, 4};
        OfdmSymbol training = modulate_training(cfg);
        TrainingModel model{training.freq, ops};
    };

    // exact cost of the CFO alone, S fixed
    double cfo_cost(const CVec &r, const CVec &S, double eps)
    {
        double c = 0.0;
        const double n = double(r.size());
        for (Eigen::Index i = 0; i < r.size(); ++i)
            c += std::norm(r(i) - std::polar(1.0, 2.0 * std::numbers::pi * eps * double(i) / n) * S(i));
        return c;
    }

    double golden_section(const CVec &r, const CVec &S, double a, double b)
    {
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - g * (b - a), d = a + g * (b - a);
        while (b - a > 1e-12)
        {
            if (cfo_cost(r, S, c) < cfo_cost(r, S, d))
                b = d;
            else
                a = c;
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        return 0.5 * (a + b);
    }

    // grid cost written with dense matrices
    double dense_grid_cost(const CVec &r, const CMat &G, const DftOperators &ops, double eps)
    {
        CMat E = ops.cfo_matrix(eps);
        CVec h = (G.adjoint() * G).inverse() * G.adjoint() * E.adjoint() * r;
        return (r - E * G * h).squaredNorm();
    }
}

TEST_CASE("EKF: zero innovation keeps the estimate at zero")
{
    Rng rng = make_rng(1);
    CVec s = complex_normal_vec(rng, 64, 1.0);
    auto tr = ekf_track(s, s, 1e-4, 0.0, {0.0, 1e-4});
    CHECK(tr.theta.cwiseAbs().maxCoeff() == 0.0);
    CHECK((tr.m_post.array() <= tr.m_pred.array()).all());
    CHECK(tr.m_post.cwiseAbs().maxCoeff() < 1e-12); // noiseless observation pins the state
    CHECK(tr.m_pred(0) == 1e-4);

    // with noise the filter stays at zero while its variance settles
    auto tn = ekf_track(s, s, 1e-4, 1e-2, {0.0, 1e-4});
    CHECK(tn.theta.cwiseAbs().maxCoeff() == 0.0);
    CHECK((tn.m_post.array() <= tn.m_pred.array()).all());
    CHECK((tn.m_post.array() > 0.0).all());
}

TEST_CASE("EKF: Jacobian against central differences")
{
    Rng rng = make_rng(2);
    std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
    for (int t = 0; t < 50; ++t)
    {
        double th = u(rng);
        cplx s = complex_normal(rng, 1.0);
        const double h = 1e-5;
        cplx fd = (std::polar(1.0, th + h) * s - std::polar(1.0, th - h) * s) / (2.0 * h);
        CHECK(std::abs(ekf_jacobian(th, s) - fd) <= 1e-6 * std::abs(fd));
    }
}

TEST_CASE("EKF: Wiener tracking error against the scalar Riccati fixed point")
{
    const double q = 1e-4, nv = 1e-3;
    double m = q;
    for (int i = 0; i < 10000; ++i)
    {
        double mp = m + q;
        m = mp * nv / (mp + nv);
    }
    Rng rng = make_rng(3);
    double se = 0.0;
    long count = 0;
    for (int trial = 0; trial < 200; ++trial)
    {
        const int n = 256;
        RVec th = sample_phn(n, q, rng);
        CVec s(n);
        for (int i = 0; i < n; ++i)
            s(i) = std::polar(1.0, std::numbers::pi / 4 + std::numbers::pi / 2 * (rng() % 4));
        CVec y(n);
        for (int i = 0; i < n; ++i)
            y(i) = cis(th(i)) * s(i) + complex_normal(rng, nv);
        auto tr = ekf_track(y, s, q, nv, {0.0, 0.0});
        for (int i = 64; i < n; ++i, ++count)
            se += (tr.theta(i) - th(i)) * (tr.theta(i) - th(i));
    }
    double mse = se / double(count);
    CHECK(mse < 3.0 * m);
    CHECK(mse > m / 3.0);
}

TEST_CASE("EKF: printed gain form is a small perturbation")
{
    Rng rng = make_rng(4);
    CVec s = complex_normal_vec(rng, 64, 1.0);
    RVec th = sample_phn(64, 1e-4, rng);
    CVec y(64);
    for (int i = 0; i < 64; ++i)
        y(i) = cis(th(i)) * s(i) + complex_normal(rng, 1e-3);
    auto a = ekf_track(y, s, 1e-4, 1e-3, {0.0, 1e-4});
    auto b = ekf_track(y, s, 1e-4, 1e-3, {0.0, 1e-4}, GainVariant::Printed);
    CHECK((a.theta - b.theta).cwiseAbs().maxCoeff() > 0.0);
    CHECK((a.theta - b.theta).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("EKF: clamped gain is flagged")
{
    CVec z = CVec::Zero(8);
    auto tr = ekf_track(z, z, 1e-4, 0.0, {0.0, 1e-4});
    CHECK(tr.gain_clamped);
    CHECK(tr.theta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("CFO update: stationary point")
{
    Fixture f;
    Rng rng = make_rng(5);
    CVec h = sample_channel(f.cfg, rng);
    CVec s = f.model.synth(h);
    double eps = 0.123;
    CVec r = apply_impairments(f.training.time, h, RVec::Zero(64), eps, 0.0, rng);
    auto st = cfo_update(r, s, eps);
    CHECK(std::abs(st.eps - eps) < 1e-14);
    CHECK(!st.ill_posed);
}

TEST_CASE("CFO update: one Newton step from 1e-3 against golden-section search")
{
    Fixture f;
    Rng rng = make_rng(6);
    for (int t = 0; t < 20; ++t)
    {
        CVec h = sample_channel(f.cfg, rng);
        CVec s = f.model.synth(h);
        double eps = std::uniform_real_distribution<double>(-0.4, 0.4)(rng);
        CVec r = apply_impairments(f.training.time, h, RVec::Zero(64), eps, 0.0, rng);
        double start = eps + (t % 2 ? 1e-3 : -1e-3);
        double gs = golden_section(r, s, start - 0.01, start + 0.01);
        CHECK(std::abs(gs - eps) < 1e-8);
        auto st = cfo_update(r, s, start);
        CHECK(std::abs(st.eps - eps) < 1e-6);
    }
}

TEST_CASE("CFO update: far start, ill-posed step, clamping")
{
    Fixture f;
    Rng rng = make_rng(7);
    CVec h = sample_channel(f.cfg, rng);
    CVec s = f.model.synth(h);
    CVec r = apply_impairments(f.training.time, h, RVec::Zero(64), 0.1, 0.0, rng);
    auto far = cfo_update(r, s, 0.4); // outside the quadratic basin: no improvement promised
    CHECK(far.eps > -0.5);
    CHECK(far.eps < 0.5);

    auto ill = cfo_update(r, CVec::Zero(64), 0.2);
    CHECK(ill.ill_posed);
    CHECK(ill.eps == 0.2);

    auto edge = cfo_update(r, s, 0.098, 0.0, 0.099);
    CHECK(edge.clamped);
    CHECK(edge.eps < 0.099);
    CHECK(edge.eps > 0.0);
}

TEST_CASE("training Gram matrix and channel LS")
{
    Fixture f;
    const CMat &G = f.model.gamma();
    CHECK((G.adjoint() * G - 64.0 * CMat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
    CMat Gw = f.ops.F().adjoint() * f.training.freq.asDiagonal() * f.ops.W();
    CHECK((Gw.adjoint() * Gw - CMat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);

    Rng rng = make_rng(8);
    CVec h = sample_channel(f.cfg, rng);
    RVec th = sample_phn(64, 1e-3, rng);
    CVec r = apply_impairments(f.training.time, h, th, -0.31, 0.0, rng);
    CHECK((ls_channel(r, -0.31, th, f.model) - h).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((ls_channel(r, -0.31, th, f.training.freq, 64, 4) - h).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("channel LS error in white noise is L*noise_var/N")
{
    Fixture f;
    Rng rng = make_rng(9);
    const double nv = 0.01;
    double acc = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t)
    {
        CVec h = sample_channel(f.cfg, rng);
        CVec r = apply_impairments(f.training.time, h, RVec::Zero(64), 0.0, nv, rng);
        acc += (ls_channel(r, 0.0, RVec::Zero(64), f.model) - h).squaredNorm();
    }
    double expect = 4.0 * nv / 64.0;
    CHECK(std::abs(acc / trials - expect) < 0.1 * expect);
}

TEST_CASE("degenerate training is rejected")
{
    DftOperators ops(8, 2);
    CHECK_THROWS_AS(TrainingModel(CVec::Zero(8), ops), DegenerateTrainingError);
    CVec one = CVec::Zero(8);
    one(3) = 1.0;
    CHECK_THROWS_AS(TrainingModel(one, ops), DegenerateTrainingError);
}

TEST_CASE("initialization grid")
{
    Fixture f;
    auto grid = cfo_grid(f.cfg);
    CHECK(grid.size() == 99);
    CHECK(std::count(grid.begin(), grid.end(), 0.0) == 1);
    CHECK(grid.front() > -0.5);
    CHECK(grid.back() < 0.5);

    Rng rng = make_rng(10);
    CVec h = sample_channel(f.cfg, rng);
    CVec r = apply_impairments(f.training.time, h, RVec::Zero(64), 0.237, 0.0, rng);
    auto init = initialize(r, f.model, f.cfg);
    CHECK(init.eps0 >= 0.227);
    CHECK(init.eps0 <= 0.247);

    CVec r0 = apply_impairments(f.training.time, h, RVec::Zero(64), 0.0, 0.0, rng);
    CHECK(initialize(r0, f.model, f.cfg).eps0 == 0.0);
}

TEST_CASE("initialization minimizes the grid cost (direct scan)")
{
    Fixture f;
    Rng rng = make_rng(11);
    const CMat &G = f.model.gamma();
    for (int t = 0; t < 100; ++t)
    {
        auto ch = sample_realization(f.cfg, rng);
        CVec r = apply_impairments(f.training.time, ch.cir, ch.phn.segment(16, 64), ch.cfo, 0.01, rng);
        auto init = initialize(r, f.model, f.cfg);
        double at = dense_grid_cost(r, G, f.ops, init.eps0);
        CHECK(std::abs(at - init.cost) <= 1e-9 * r.squaredNorm());
        for (double e : cfo_grid(f.cfg))
            CHECK(at <= dense_grid_cost(r, G, f.ops, e) + 1e-9 * r.squaredNorm());
    }
}

TEST_CASE("ECM: exact recovery without noise or phase noise")
{
    Fixture f;
    f.cfg.phn_var = 0.0;
    f.cfg.noise_var = 0.0;
    Rng rng = make_rng(12);
    for (int t = 0; t < 50; ++t)
    {
        auto ch = sample_realization(f.cfg, rng);
        CVec r = apply_impairments(f.training.time, ch.cir, RVec::Zero(64), ch.cfo, 0.0, rng);
        auto est = ecm_estimate(r, f.model, f.cfg);
        CHECK(est.converged);
        CHECK(est.iters <= 8); // the coordinate-wise M-step converges linearly

        CHECK(est.final_cost < 1e-12);
        CHECK((est.h_hat - ch.cir).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(std::abs(est.eps_hat - ch.cfo) < 1e-6);
    }
}

TEST_CASE("ECM: iterations, monotone cost and range at moderate SNR")
{
    Fixture f;
    f.cfg.phn_var = 1e-4;
    Rng rng = make_rng(13);
    for (double snr : {10.0, 20.0})
    {
        f.cfg.noise_var = snr_to_noise_var(snr);
        std::vector<double> iters;
        int monotone = 0;
        const int trials = 200;
        for (int t = 0; t < trials; ++t)
        {
            auto ch = sample_realization(f.cfg, rng);
            CVec r = apply_impairments(f.training.time, ch.cir, ch.phn.segment(16, 64), ch.cfo, f.cfg.noise_var, rng);
            auto est = ecm_estimate(r, f.model, f.cfg);
            iters.push_back(est.iters);
            // increases below the stopping threshold count as flat
            const double zeta = stop_threshold(f.cfg, r.squaredNorm());
            bool mono = true;
            for (size_t k = 1; k < est.cost_history.size(); ++k)
                mono &= est.cost_history[k] <= est.cost_history[k - 1] + zeta;
            monotone += mono;
            CHECK(est.eps_hat > -0.5);
            CHECK(est.eps_hat < 0.5);
            CHECK(est.iters >= 1);
            CHECK(est.final_cost >= 0.0);
            CHECK(est.theta_hat(0) == 0.0);
        }
        if (snr == 20.0)
            CHECK(median(iters) <= 4.0);
        CHECK(monotone >= 0.95 * trials);
    }
}

TEST_CASE("ECM: efficient without phase noise (per-trial Fisher bound)")
{
    // with theta known to be zero the model is r = E(eps) Gamma h + w; the estimator should sit on the
    // CRB of (Re h, Im h, eps) for each channel. Errors are normalized trial by trial because the
    // bound averaged over Rayleigh draws is dominated by deep fades.
    Fixture f;
    f.cfg.phn_var = 0.0;
    f.cfg.noise_var = snr_to_noise_var(25.0);
    CMat G = f.ops.gamma(f.training.freq);
    Rng rng = make_rng(31);
    double zh = 0.0, ze = 0.0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t)
    {
        auto ch = sample_realization(f.cfg, rng);
        CVec r = apply_impairments(f.training.time, ch.cir, RVec::Zero(64), ch.cfo, f.cfg.noise_var, rng);
        auto est = ecm_estimate(r, f.model, f.cfg);

        CMat J(64, 9);
        J.leftCols(4) = G;
        J.middleCols(4, 4) = imag_j * G;
        CVec s = G * ch.cir;
        for (int i = 0; i < 64; ++i)
            J(i, 8) = imag_j * (two_pi * i / 64.0) * s(i);
        RMat crb = ((2.0 / f.cfg.noise_var) * (J.adjoint() * J).real()).inverse();

        zh += (est.h_hat - ch.cir).squaredNorm() / crb.topLeftCorner(8, 8).trace() / trials;
        ze += (est.eps_hat - ch.cfo) * (est.eps_hat - ch.cfo) / crb(8, 8) / trials;
    }
    MESSAGE("normalized channel error " << zh << ", CFO " << ze);
    CHECK(zh == doctest::Approx(1.0).epsilon(0.15));
    CHECK(ze == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("ECM: training-pass EKF variance bounds")
{
    Fixture f;
    Rng rng = make_rng(14);
    f.cfg.noise_var = 0.01;
    auto ch = sample_realization(f.cfg, rng);
    CVec r = apply_impairments(f.training.time, ch.cir, ch.phn.segment(16, 64), ch.cfo, 0.01, rng);
    auto est = ecm_estimate(r, f.model, f.cfg);
    CVec y = derotate_cfo(r, est.eps_hat);
    auto tr = ekf_track(y, f.model.synth(est.h_hat), f.cfg.phn_var, f.cfg.noise_var, {0.0, 0.0});
    for (int n = 1; n < 64; ++n)
    {
        CHECK(tr.m_post(n) > 0.0);
        CHECK(tr.m_post(n) <= f.cfg.phn_var + 64 * f.cfg.phn_var);
    }
}

TEST_CASE("ECM: equivalent-model phase absorption leaves the cost unchanged")
{
    Fixture f;
    Rng rng = make_rng(15);
    f.cfg.noise_var = 1e-3;
    auto ch = sample_realization(f.cfg, rng);
    RVec th = ch.phn.segment(16, 64);
    Rng n1 = make_rng(99), n2 = make_rng(99);
    CVec ra = apply_impairments(f.training.time, ch.cir, th, ch.cfo, 1e-3, n1);
    const double phi = 1.1;
    RVec shifted = th.array() - phi;
    CVec rb = apply_impairments(f.training.time, cis(phi) * ch.cir, shifted, ch.cfo, 1e-3, n2);
    auto a = ecm_estimate(ra, f.model, f.cfg);
    auto b = ecm_estimate(rb, f.model, f.cfg);
    CHECK(std::abs(a.final_cost - b.final_cost) <= 1e-9 * a.final_cost);
}

TEST_CASE("ECM: estimates stay inside a narrow CFO range")
{
    Fixture f;
    f.cfg.cfo_lo = -0.1;
    f.cfg.cfo_hi = 0.1;
    f.cfg.noise_var = 0.1;
    Rng rng = make_rng(16);
    for (int t = 0; t < 50; ++t)
    {
        auto ch = sample_realization(f.cfg, rng);
        ch.cfo = t % 2 ? 0.0999 : -0.0999;
        CVec r = apply_impairments(f.training.time, ch.cir, ch.phn.segment(16, 64), ch.cfo, f.cfg.noise_var, rng);
        auto est = ecm_estimate(r, f.model, f.cfg);
        CHECK(est.eps_hat > -0.1);
        CHECK(est.eps_hat < 0.1);
    }
}

TEST_CASE("ECM: convenience overload and configuration errors")
{
    Fixture f;
    Rng rng = make_rng(17);
    auto ch = sample_realization(f.cfg, rng);
    CVec r = apply_impairments(f.training.time, ch.cir, ch.phn.segment(16, 64), ch.cfo, f.cfg.noise_var, rng);
    auto a = ecm_estimate(r, f.model, f.cfg);
    auto b = ecm_estimate(r, f.training.freq, f.cfg);
    CHECK(a.eps_hat == b.eps_hat);
    CHECK(a.iters == b.iters);
    CHECK_THROWS_AS(ecm_estimate(CVec(r.head(32)), f.model, f.cfg), ArgumentError);
    SimConfig bad = f.cfg;
    bad.n_subcarriers = 60;
    CHECK_THROWS_AS(ecm_estimate(r, f.training.freq, bad), ConfigError);
}

TEST_CASE("runtime counters")
{
    Fixture f;
    Rng rng = make_rng(18);
    auto ch = sample_realization(f.cfg, rng);
    CVec r = apply_impairments(f.training.time, ch.cir, ch.phn.segment(16, 64), ch.cfo, 0.01, rng);

    reset_counters();
    set_counters_enabled(false);
    ecm_estimate(r, f.model, f.cfg);
    CHECK(runtime_counters().total() == 0);

    OpCounts one;
    {
        OpCounterScope scope;
        ecm_estimate(r, f.model, f.cfg);
        one = scope.counts();
        CHECK(one.mults > 0);
        CHECK(one.adds > 0);
        ecm_estimate(r, f.model, f.cfg);
        CHECK(scope.counts().mults == 2 * one.mults);
        CHECK(scope.counts().adds == 2 * one.adds);
    }
    CHECK(!counters_enabled());
}

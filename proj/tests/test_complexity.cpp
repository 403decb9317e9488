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

#include "ofdm/complexity.hpp"
#include "ofdm/detector.hpp"
#include "ofdm/ecm.hpp"
#include "ofdm/op_counter.hpp"

#include <cmath>
#include <vector>

using namespace ofdm;

namespace
{
    // least-squares slope of log(total) against log(N)
    template <class F>
    double loglog_slope(F &&total_at)
    {
        std::vector<double> x, y;
        for (double n : {64.0, 128.0, 256.0, 512.0})
        {
            x.push_back(std::log(n));
            y.push_back(std::log(double(total_at(static_cast<std::uint64_t>(n)))));
        }
        double mx = 0, my = 0;
        for (size_t i = 0; i < x.size(); ++i)
            mx += x[i] / 4, my += y[i] / 4;
        double sxy = 0, sxx = 0;
        for (size_t i = 0; i < x.size(); ++i)
            sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
        return sxy / sxx;
    }
}

// golden values from a separate integer evaluation of the printed formulas
TEST_CASE("golden counts at N=64, L=4")
{
    auto est = complexity_proposed_est(64, 4, 2, 100);
    CHECK(est.mults == 32104320u);
    CHECK(est.adds == 5679594u);
    CHECK(est.total() == est.mults + est.adds);

    auto det = complexity_proposed_det(64, 4, 2);
    CHECK(det.mults == 4503552u);
    CHECK(det.adds == 199782976u);

    auto b8 = complexity_baseline_est(64, 4, 1000);
    CHECK(b8.mults == 2914813184u);
    CHECK(b8.adds == 2877470420u);

    auto b20 = complexity_baseline_det(64, 4);
    CHECK(b20.mults == 13209600u);
    CHECK(b20.adds == 13056448u);

    auto base = complexity_baseline(64, 4, 1000, 4);
    CHECK(base.mults == b8.mults + b20.mults);
    CHECK(base.adds == b8.adds + b20.adds);
    CHECK(base.t8 == 1000u);
    CHECK(base.t20 == 4u);

    auto prop = complexity_proposed(64, 4, 2, 100, 2);
    CHECK(prop.total() == est.total() + det.total());
    CHECK(prop.n == 64u);
    CHECK(prop.t_init == 100u);
}

TEST_CASE("loop-free residues")
{
    for (std::uint64_t n : {2u, 8u, 64u, 256u})
        for (std::uint64_t l : {1u, 2u})
        {
            auto est = complexity_proposed_est(n, l, 0, 0);
            CHECK(est.mults == n * n * (n + l));
            CHECK(est.adds == n * (n - 1) * (n + l));

            // initial equalizer plus the frequency response
            auto det = complexity_proposed_det(n, l, 0);
            CHECK(det.mults == n * n * (5 * n + 1) + n * l);
            CHECK(det.adds == n * (n * n + n * (n - 1) * (4 * n + 1)) + n * (l - 1));
        }
}

TEST_CASE("iteration counts enter linearly")
{
    auto e0 = complexity_proposed_est(64, 4, 0, 0);
    auto e1 = complexity_proposed_est(64, 4, 1, 0);
    auto e2 = complexity_proposed_est(64, 4, 2, 0);
    CHECK(e2.mults - e0.mults == 2 * (e1.mults - e0.mults));
    CHECK(e2.adds - e0.adds == 2 * (e1.adds - e0.adds));

    auto i1 = complexity_proposed_est(64, 4, 0, 50);
    auto i2 = complexity_proposed_est(64, 4, 0, 100);
    CHECK(i2.total() - e0.total() == 2 * (i1.total() - e0.total()));

    auto d0 = complexity_proposed_det(64, 4, 0);
    auto d1 = complexity_proposed_det(64, 4, 1);
    auto d3 = complexity_proposed_det(64, 4, 3);
    CHECK(d3.mults - d0.mults == 3 * (d1.mults - d0.mults));
    CHECK(d3.adds - d0.adds == 3 * (d1.adds - d0.adds));
}

TEST_CASE("baseline is monotone in its iteration counts")
{
    auto one = complexity_baseline(64, 4, 1, 1);
    CHECK(one.mults > 0u);
    std::uint64_t prev = 0;
    for (std::uint64_t t8 : {1u, 2u, 10u, 100u, 1000u})
    {
        auto c = complexity_baseline(64, 4, t8, 4);
        CHECK(c.total() > prev);
        prev = c.total();
    }
    CHECK(complexity_baseline(64, 4, 1000, 5).total() > complexity_baseline(64, 4, 1000, 4).total());
}

TEST_CASE("cubic growth in N")
{
    double se = loglog_slope([](std::uint64_t n) { return complexity_proposed_est(n, 4, 2, 100).total(); });
    double sd = loglog_slope([](std::uint64_t n) { return complexity_proposed_det(n, 4, 2).mults; });
    double sb = loglog_slope([](std::uint64_t n) { return complexity_baseline(n, 4, 1000, 4).total(); });
    CHECK(se == doctest::Approx(3.0).epsilon(0.2 / 3.0));
    CHECK(sd == doctest::Approx(3.0).epsilon(0.2 / 3.0));
    CHECK(sb == doctest::Approx(3.0).epsilon(0.2 / 3.0));

    // the printed equalizer add count N(N^2 + N(N-1)(4N+1)) is quartic and dominates the detector total
    double sda = loglog_slope([](std::uint64_t n) { return complexity_proposed_det(n, 4, 2).adds; });
    CHECK(sda == doctest::Approx(4.0).epsilon(0.2 / 4.0));
}

TEST_CASE("baseline to proposed ratio at the reference operating point")
{
    double r = complexity_ratio(complexity_baseline(64, 4, 1000, 4), complexity_proposed(64, 4, 2, 100, 2));
    CHECK(r == doctest::Approx(24.0366).epsilon(1e-5));
    CHECK(std::abs(r - 23.8) <= 0.15 * 23.8);
    CHECK(complexity_ratio(complexity_baseline(64, 4, 1, 1), ComplexityReport{}) == 0.0);
}

TEST_CASE("runtime counters beside the analytic estimate")
{
    SimConfig cfg;
    cfg.n_subcarriers = 8;
    cfg.n_taps = 2;
    cfg.cp_len = 2;
    cfg.pdp_db = {0.0, -3.0};
    cfg.phn_var = 1e-4;
    cfg.noise_var = 1e-2;
    cfg.est.ecm_max_iters = 1;
    cfg.est.reject_increase = false;
    DftOperators ops(8, 2);
    OfdmSymbol tr = modulate_training(cfg);
    TrainingModel model(tr.freq, ops);
    Rng rng = make_rng(2);
    auto ch = sample_realization(cfg, rng);
    CVec r = apply_impairments(tr.time, ch.cir, ch.phn.segment(cfg.cp_len, 8), ch.cfo, cfg.noise_var, rng);

    CHECK_FALSE(counters_enabled());
    OpCounts init, full;
    {
        OpCounterScope scope;
        initialize(r, model, cfg);
        init = scope.counts();
    }
    {
        OpCounterScope scope;
        auto est = ecm_estimate(r, model, cfg);
        REQUIRE(est.iters == 1);
        full = scope.counts();
    }
    CHECK_FALSE(counters_enabled());
    REQUIRE(full.mults > init.mults);

    // the analytic bracket builds s_n with dense transforms; the code does not
    auto a1 = complexity_proposed_est(8, 2, 1, 0);
    auto a0 = complexity_proposed_est(8, 2, 0, 0);
    double measured = double(full.mults - init.mults), analytic = double(a1.mults - a0.mults);
    MESSAGE("one iteration, N=8 L=2: measured mults " << measured << ", analytic " << analytic
                                                      << ", ratio " << analytic / measured);
    CHECK(measured > 0.0);
}

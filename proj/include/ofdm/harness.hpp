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

#pragma once

#include "ofdm/common.hpp"
#include "ofdm/complexity.hpp"
#include "ofdm/hcrb.hpp"
#include "ofdm/qam.hpp"
#include "ofdm/signal_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <string>
#include <thread>
#include <vector>

namespace ofdm
{
    enum class Mode
    {
        Hcrb,
        Estimate,
        Ber,
        Complexity
    };

    struct ExperimentSpec
    {
        Mode mode = Mode::Ber;
        std::vector<double> snr_grid_db = {20.0};
        int trials = 1000;
        SimConfig config;
        std::string output_path;
        unsigned threads = 0; // 0: hardware concurrency
        PhnPrior prior = PhnPrior::Anchored;

        void validate() const; // throws ConfigError
    };

    struct ResultRow
    {
        double snr_db = 0.0;
        double phn_var = 0.0;
        std::string metric;
        double value = 0.0;
        double stderr_ = 0.0;
        long n_trials = 0;
    };

    // sigma_w^2 = 1 / 10^(snr/10) at unit symbol energy
    inline double snr_to_noise_var(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

    // Parses "a:step:b" (inclusive) or a comma separated list
    std::vector<double> parse_snr_grid(const std::string &text);

    // One packet: training symbol first, then data symbols
    struct PacketTrial
    {
        ChannelRealization channel;
        std::vector<OfdmSymbol> symbols;
        std::vector<std::vector<std::uint8_t>> bits; // per data symbol
        CVec rx;                                     // received stream including prefixes
    };

    PacketTrial simulate_packet(const SimConfig &config, const OfdmSymbol &training, const Constellation &qam, Rng &rng);

    // Trial RNG for (seed, SNR index, trial index)
    Rng trial_rng(std::uint64_t seed, std::size_t snr_index, std::size_t trial);

    struct EstimateTrial
    {
        double snr_db = 0.0;
        long trial = 0;
        bool failed = false;
        double mse_channel = 0.0; // sum over taps
        double mse_cfo = 0.0;
        double mse_phn = 0.0;     // mean over n = 1..N-1
        int iters = 0;
        bool converged = false;
        bool cost_monotone = true;
        bool hcrb_ok = false;
        double hcrb_channel = 0.0, hcrb_cfo = 0.0, hcrb_phn = 0.0;
    };

    struct BerTrial
    {
        double snr_db = 0.0;
        long trial = 0;
        bool failed = false;
        std::uint64_t bits = 0;
        std::uint64_t err_proposed = 0, err_no_tracking = 0, err_genie = 0;
        std::uint64_t symbols = 0; // QAM symbols
        std::uint64_t sym_err_proposed = 0, sym_err_no_tracking = 0;
        int ecm_iters = 0;
        std::vector<int> det_iters;
        std::vector<std::uint8_t> det_monotone;
    };

    std::vector<EstimateTrial> run_estimate_trials(const ExperimentSpec &spec, std::size_t snr_index);
    std::vector<BerTrial> run_ber_trials(const ExperimentSpec &spec, std::size_t snr_index);

    std::vector<ResultRow> run_mse_sweep(const ExperimentSpec &spec, std::vector<EstimateTrial> *per_trial = nullptr);
    std::vector<ResultRow> run_ber_sweep(const ExperimentSpec &spec);
    std::vector<ResultRow> run_hcrb_sweep(const ExperimentSpec &spec);

    struct ComplexityGrid
    {
        std::vector<std::uint64_t> n = {64}, l = {4}, t_ecm = {2}, t_init = {100}, t_det = {2}, t8 = {1000}, t20 = {4};
    };
    std::vector<ComplexityReport> run_complexity(const ComplexityGrid &grid);

    // Shortest round-trip decimal form
    std::string format_double(double v);

    void write_csv(std::ostream &os, const std::vector<ResultRow> &rows, const std::vector<std::string> &comments);
    void write_estimate_trials_csv(std::ostream &os, const std::vector<EstimateTrial> &trials);
    void write_complexity_csv(std::ostream &os, const std::vector<ComplexityReport> &rows);

    // mean and standard error of the mean
    struct Moments
    {
        double mean = 0.0;
        double stderr_ = 0.0;
        long n = 0;
    };
    Moments moments(const std::vector<double> &x);
    double median(std::vector<double> x);

    // Runs fn(i) for i in [0, count) on a worker pool; results are stored by index
    template <typename T, typename Fn>
    std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn fn)
    {
        std::vector<T> out(count);
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads == 0 ? hw : threads, count));
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                out[i] = fn(i);
            return out;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w]
                                  {
                    try
                    {
                        for (std::size_t i = next++; i < count; i = next++)
                            out[i] = fn(i);
                    }
                    catch (...)
                    {
                        errors[w] = std::current_exception();
                        next = count;
                    } });
        }
        for (auto &e : errors)
            if (e)
                std::rethrow_exception(e);
        return out;
    }
}

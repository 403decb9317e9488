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
#include "ofdm/random.hpp"

#include <cstdint>
#include <vector>

namespace ofdm
{
    enum class GainVariant
    {
        Standard, // K_n uses the predicted variance M_{n|n-1}
        Printed   // K_n uses M_{n-1|n-1} in the denominator
    };

    struct EstimatorOptions
    {
        double zeta_rel = 1e-3;  // stopping threshold in units of N * noise_var
        int ecm_max_iters = 20;
        int det_max_iters = 10;
        double grid_step = 1e-2; // CFO initialization grid
        bool cfo_phase_profile = true; // Newton CFO step also profiles the common phase
        bool reject_increase = true;   // stop at the previous iterate when a step raises the cost by more than zeta
        GainVariant gain = GainVariant::Standard;
        bool reinit_covariance = false; // detector: restart M at phn_var for every data symbol
    };

    struct SimConfig
    {
        int n_subcarriers = 64;
        int n_taps = 4;
        int cp_len = 16;
        int training_mod = 4;
        int data_mod = 64;
        double phn_var = 1e-4;
        double noise_var = 1e-2;
        double cfo_lo = -0.5; // open interval
        double cfo_hi = 0.5;
        int n_data_symbols = 5;
        std::vector<double> pdp_db = {-1.52, -6.75, -11.91, -17.08};
        std::uint64_t rng_seed = 1;
        EstimatorOptions est;

        void validate() const; // throws ConfigError
        int symbol_len() const { return n_subcarriers + cp_len; }
        int packet_len() const { return (n_data_symbols + 1) * symbol_len(); }
        std::vector<double> pdp_linear() const;
    };

    // Stopping threshold shared by the estimator and the detector
    double stop_threshold(const SimConfig &config, double signal_energy);

    struct ChannelRealization
    {
        CVec cir;    // L taps
        RVec phn;    // one value per stream sample, zero at the first post-prefix training sample
        double cfo = 0.0;
    };

    struct OfdmSymbol
    {
        CVec freq; // d
        CVec time; // x = F^H d
        CVec cp;   // last cp_len samples of x
    };

    // Dense transforms for one (N, L).
    // F is the unitary DFT, W = F(:, 0:L-1). The channel enters through V = sqrt(N) W,
    // so V h is the frequency response and F^H diag(d) V h = h (*) x is the circular
    // convolution of the CIR with the time-domain symbol.
    class DftOperators
    {
    public:
        DftOperators(int n, int l);

        int n() const { return n_; }
        int l() const { return l_; }
        const CMat &F() const { return F_; }
        const CMat &W() const { return W_; }
        const CMat &V() const { return V_; }

        CVec dft(const CVec &x) const;  // F x
        CVec idft(const CVec &d) const; // F^H d
        CVec freq_response(const CVec &h) const { return V_ * h; }

        // Gamma = F^H D V for pilots d
        CMat gamma(const CVec &d) const;

        CMat cfo_matrix(double eps) const;           // E = diag(e^{j 2 pi eps n / N})
        CMat phn_matrix(const RVec &theta) const;    // P = diag(e^{j theta_n})

    private:
        int n_, l_;
        CMat F_, W_, V_;
    };

    OfdmSymbol make_symbol(const CVec &d, int cp_len);

    // Fixed pseudo-random QPSK pilots derived from config.rng_seed
    OfdmSymbol modulate_training(const SimConfig &config);

    CVec sample_channel(const SimConfig &config, Rng &rng);

    RVec sample_phn(int n_samples, double phn_var, Rng &rng);

    // Channel, packet-long PHN (equivalent model) and uniform CFO for one packet
    ChannelRealization sample_realization(const SimConfig &config, Rng &rng);

    // h (*) x, circular
    CVec circular_convolve(const CVec &x, const CVec &h);

    // r_n = e^{j(theta_n + 2 pi eps (n + ramp_offset) / N)} (h (*) x)_n + w_n
    CVec apply_impairments(const CVec &x, const CVec &h, const RVec &theta, double eps,
                           double noise_var, Rng &rng, long ramp_offset = 0);

    // Concatenated [cp_0 x_0 cp_1 x_1 ...]
    CVec transmit_stream(const std::vector<OfdmSymbol> &symbols);

    // Linear convolution with the CIR, PHN and CFO along the stream, plus AWGN.
    // The CFO ramp is zero at sample cp_len (first post-prefix training sample).
    CVec receive_stream(const CVec &tx, const ChannelRealization &ch, int n_subcarriers, int cp_len,
                        double noise_var, Rng &rng);

    // Post-prefix samples of symbol m out of a received stream
    CVec symbol_samples(const CVec &stream, int m, int n_subcarriers, int cp_len);

    // Sample index (relative to the training symbol start) used by the CFO ramp of symbol m
    inline long ramp_offset(int m, int n_subcarriers, int cp_len) { return static_cast<long>(m) * (n_subcarriers + cp_len); }
}

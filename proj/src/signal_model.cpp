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

#include "ofdm/signal_model.hpp"
#include "ofdm/qam.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace ofdm
{
    namespace
    {
        constexpr std::uint64_t pilot_stream = 0x70696c6f74ull;

        void require(bool ok, const std::string &msg)
        {
            if (!ok)
                throw ConfigError(msg);
        }
    }

    void SimConfig::validate() const
    {
        require(n_subcarriers >= 2 && std::has_single_bit(static_cast<unsigned>(n_subcarriers)),
                "n_subcarriers must be a power of two >= 2");
        require(n_taps >= 1 && n_taps <= n_subcarriers, "n_taps must satisfy 1 <= L <= N");
        require(cp_len >= n_taps - 1, "cp_len must be at least L-1");
        require(training_mod == 4, "training constellation must be QPSK (4)");
        Constellation check(data_mod); // throws on unsupported order
        (void)check;
        require(std::isfinite(phn_var) && phn_var >= 0.0, "phn_var must be finite and >= 0");
        require(std::isfinite(noise_var) && noise_var >= 0.0, "noise_var must be finite and >= 0");
        require(cfo_lo > -0.5 - 1e-15 && cfo_hi < 0.5 + 1e-15 && cfo_lo < cfo_hi, "cfo_range must lie inside (-0.5, 0.5)");
        require(n_data_symbols >= 0, "n_data_symbols must be >= 0");
        require(static_cast<int>(pdp_db.size()) == n_taps, "pdp_db must have n_taps entries");
        for (double p : pdp_db)
            require(std::isfinite(p), "pdp_db entries must be finite");
        require(est.zeta_rel >= 0.0, "zeta_rel must be >= 0");
        require(est.ecm_max_iters >= 1 && est.det_max_iters >= 1, "iteration caps must be >= 1");
        require(est.grid_step > 0.0, "grid_step must be > 0");
    }

    std::vector<double> SimConfig::pdp_linear() const
    {
        std::vector<double> out(pdp_db.size());
        std::transform(pdp_db.begin(), pdp_db.end(), out.begin(), [](double db) { return std::pow(10.0, db / 10.0); });
        return out;
    }

    double stop_threshold(const SimConfig &config, double signal_energy)
    {
        return std::max(config.est.zeta_rel * config.n_subcarriers * config.noise_var, 1e-18 * signal_energy);
    }

    DftOperators::DftOperators(int n, int l) : n_(n), l_(l)
    {
        if (n < 1 || l < 1 || l > n)
            throw ConfigError("DftOperators needs 1 <= L <= N");
        F_.resize(n, n);
        double norm = 1.0 / std::sqrt(double(n));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
            {
                // reduce the exponent modulo N before evaluating the phase
                long k = (static_cast<long>(r) * c) % n;
                F_(r, c) = norm * cis(-two_pi * double(k) / n);
            }
        W_ = F_.leftCols(l);
        V_ = std::sqrt(double(n)) * W_;
    }

    CVec DftOperators::dft(const CVec &x) const
    {
        if (x.size() != n_)
            throw ArgumentError("dft: length mismatch");
        return F_ * x;
    }

    CVec DftOperators::idft(const CVec &d) const
    {
        if (d.size() != n_)
            throw ArgumentError("idft: length mismatch");
        return F_.adjoint() * d;
    }

    CMat DftOperators::gamma(const CVec &d) const
    {
        if (d.size() != n_)
            throw ArgumentError("gamma: pilot length mismatch");
        return F_.adjoint() * (d.asDiagonal() * V_);
    }

    CMat DftOperators::cfo_matrix(double eps) const
    {
        CVec e(n_);
        for (int i = 0; i < n_; ++i)
            e(i) = cis(two_pi * eps * i / n_);
        return e.asDiagonal();
    }

    CMat DftOperators::phn_matrix(const RVec &theta) const
    {
        if (theta.size() != n_)
            throw ArgumentError("phn_matrix: length mismatch");
        CVec p(n_);
        for (int i = 0; i < n_; ++i)
            p(i) = cis(theta(i));
        return p.asDiagonal();
    }

    OfdmSymbol make_symbol(const CVec &d, int cp_len)
    {
        Eigen::Index n = d.size();
        if (n < 1 || cp_len < 0 || cp_len > n)
            throw ArgumentError("make_symbol: invalid length");
        // unitary IDFT, direct sum (no operator cache needed)
        OfdmSymbol s;
        s.freq = d;
        s.time.resize(n);
        double norm = 1.0 / std::sqrt(double(n));
        for (Eigen::Index t = 0; t < n; ++t)
        {
            cplx acc = 0.0;
            for (Eigen::Index k = 0; k < n; ++k)
                acc += d(k) * cis(two_pi * double((t * k) % n) / double(n));
            s.time(t) = norm * acc;
        }
        s.cp = s.time.tail(cp_len);
        return s;
    }

    OfdmSymbol modulate_training(const SimConfig &config)
    {
        config.validate();
        Rng rng = make_rng(config.rng_seed, pilot_stream);
        Constellation qpsk(4);
        std::vector<std::uint8_t> bits(2 * static_cast<size_t>(config.n_subcarriers));
        std::uniform_int_distribution<int> bit(0, 1);
        for (auto &b : bits)
            b = static_cast<std::uint8_t>(bit(rng));
        return make_symbol(qpsk.map(bits), config.cp_len);
    }

    CVec sample_channel(const SimConfig &config, Rng &rng)
    {
        auto pw = config.pdp_linear();
        CVec h(static_cast<Eigen::Index>(pw.size()));
        for (size_t l = 0; l < pw.size(); ++l)
            h(static_cast<Eigen::Index>(l)) = complex_normal(rng, pw[l]);
        return h;
    }

    RVec sample_phn(int n_samples, double phn_var, Rng &rng)
    {
        if (n_samples < 1)
            throw ConfigError("sample_phn: n_samples must be >= 1");
        if (!(phn_var >= 0.0) || !std::isfinite(phn_var))
            throw ConfigError("sample_phn: phn_var must be finite and >= 0");
        RVec th(n_samples);
        th(0) = 0.0;
        for (int i = 1; i < n_samples; ++i)
            th(i) = th(i - 1) + real_normal(rng, phn_var);
        return th;
    }

    ChannelRealization sample_realization(const SimConfig &config, Rng &rng)
    {
        ChannelRealization ch;
        ch.cir = sample_channel(config, rng);
        ch.phn = sample_phn(config.packet_len(), config.phn_var, rng);
        ch.phn.array() -= ch.phn(config.cp_len);
        std::uniform_real_distribution<double> u(config.cfo_lo, config.cfo_hi);
        do
            ch.cfo = u(rng);
        while (ch.cfo <= -0.5 || ch.cfo >= 0.5);
        return ch;
    }

    CVec circular_convolve(const CVec &x, const CVec &h)
    {
        Eigen::Index n = x.size();
        if (h.size() > n)
            throw ArgumentError("circular_convolve: channel longer than symbol");
        CVec s = CVec::Zero(n);
        for (Eigen::Index t = 0; t < n; ++t)
            for (Eigen::Index l = 0; l < h.size(); ++l)
                s(t) += h(l) * x((t - l + n) % n);
        return s;
    }

    CVec apply_impairments(const CVec &x, const CVec &h, const RVec &theta, double eps,
                           double noise_var, Rng &rng, long ramp_offset)
    {
        Eigen::Index n = x.size();
        if (theta.size() != n)
            throw ArgumentError("apply_impairments: theta length must equal N");
        if (h.size() < 1 || h.size() > n)
            throw ArgumentError("apply_impairments: channel length must be in [1, N]");
        if (noise_var < 0.0)
            throw ArgumentError("apply_impairments: negative noise variance");
        CVec s = circular_convolve(x, h);
        CVec r(n);
        for (Eigen::Index t = 0; t < n; ++t)
        {
            double ph = theta(t) + two_pi * eps * double(t + ramp_offset) / double(n);
            r(t) = cis(ph) * s(t) + complex_normal(rng, noise_var);
        }
        return r;
    }

    CVec transmit_stream(const std::vector<OfdmSymbol> &symbols)
    {
        Eigen::Index len = 0;
        for (const auto &s : symbols)
            len += s.cp.size() + s.time.size();
        CVec tx(len);
        Eigen::Index pos = 0;
        for (const auto &s : symbols)
        {
            tx.segment(pos, s.cp.size()) = s.cp;
            pos += s.cp.size();
            tx.segment(pos, s.time.size()) = s.time;
            pos += s.time.size();
        }
        return tx;
    }

    CVec receive_stream(const CVec &tx, const ChannelRealization &ch, int n_subcarriers, int cp_len,
                        double noise_var, Rng &rng)
    {
        if (ch.phn.size() != tx.size())
            throw ArgumentError("receive_stream: PHN length must equal stream length");
        Eigen::Index len = tx.size();
        CVec r(len);
        for (Eigen::Index t = 0; t < len; ++t)
        {
            cplx acc = 0.0;
            for (Eigen::Index l = 0; l < ch.cir.size() && l <= t; ++l)
                acc += ch.cir(l) * tx(t - l);
            double ph = ch.phn(t) + two_pi * ch.cfo * double(t - cp_len) / double(n_subcarriers);
            r(t) = cis(ph) * acc + complex_normal(rng, noise_var);
        }
        return r;
    }

    CVec symbol_samples(const CVec &stream, int m, int n_subcarriers, int cp_len)
    {
        Eigen::Index start = static_cast<Eigen::Index>(m) * (n_subcarriers + cp_len) + cp_len;
        if (m < 0 || start + n_subcarriers > stream.size())
            throw ArgumentError("symbol_samples: symbol index out of range");
        return stream.segment(start, n_subcarriers);
    }
}

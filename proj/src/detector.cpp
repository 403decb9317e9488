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

#include "ofdm/detector.hpp"
#include "ofdm/op_counter.hpp"

#include <cmath>

namespace ofdm
{
    namespace
    {
        CVec rotate(const CVec &y, const RVec &theta, double sign)
        {
            CVec out(y.size());
            for (Eigen::Index i = 0; i < y.size(); ++i)
                out(i) = cis(sign * theta(i)) * y(i);
            return out;
        }

        struct Iterate
        {
            CVec d;
            RVec theta;
            EkfState last;
            double cost;
        };
    }

    CVec equalize_freq(const CVec &y, const CVec &freq, const RVec &theta_hat, double noise_var, const DftOperators &ops)
    {
        const Eigen::Index n = ops.n();
        if (y.size() != n || freq.size() != n || theta_hat.size() != n)
            throw ArgumentError("equalize: length mismatch");
        CVec Y = ops.F() * rotate(y, theta_hat, -1.0);
        CVec d(n);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            double den = std::norm(freq(k)) + noise_var;
            d(k) = den > 0.0 ? std::conj(freq(k)) * Y(k) / den : cplx(0.0);
        }
        count_ops(static_cast<std::uint64_t>(n * n + 3 * n), static_cast<std::uint64_t>(n * (n - 1) + n));
        return d;
    }

    CVec equalize(const CVec &y, const CVec &h_hat, const RVec &theta_hat, double noise_var, const DftOperators &ops)
    {
        return equalize_freq(y, ops.freq_response(h_hat), theta_hat, noise_var, ops);
    }

    DetectionResult detect_symbol(const CVec &y, const CVec &h_hat, EkfState phn_prev, const SimConfig &config,
                                  const DftOperators &ops, const Constellation &qam)
    {
        const Eigen::Index n = ops.n();
        if (y.size() != n || h_hat.size() != ops.l())
            throw ArgumentError("detect_symbol: dimension mismatch");
        const double zeta = stop_threshold(config, y.squaredNorm());
        const double sd = config.phn_var;
        const CVec freq = ops.freq_response(h_hat);

        auto synth = [&](const CVec &d)
        {
            count_ops(static_cast<std::uint64_t>(n * n + n), static_cast<std::uint64_t>(n * (n - 1)));
            return CVec(ops.F().adjoint() * d.cwiseProduct(freq));
        };

        // start from the previous symbol's final phase held constant
        Iterate cur;
        cur.theta = RVec::Constant(n, phn_prev.theta_hat);
        cur.last = {phn_prev.theta_hat, phn_prev.m_cov + double(config.cp_len + n) * sd};
        cur.d = qam.slice(equalize_freq(y, freq, cur.theta, config.noise_var, ops));
        CVec s = synth(cur.d);
        cur.cost = residual_cost(y, cur.theta, s);

        DetectionResult res;
        res.cost_history.push_back(cur.cost);
        Iterate best = cur;

        EkfState init{phn_prev.theta_hat,
                      config.est.reinit_covariance ? sd : phn_prev.m_cov + double(config.cp_len + 1) * sd};

        for (int it = 1; it <= config.est.det_max_iters; ++it)
        {
            EkfTrack tr = ekf_track(y, s, sd, config.noise_var, init, config.est.gain);
            Iterate next;
            next.theta = tr.theta;
            next.last = tr.last();
            next.d = qam.slice(equalize_freq(y, freq, next.theta, config.noise_var, ops));
            s = synth(next.d);
            next.cost = residual_cost(y, next.theta, s);

            res.iters = it;
            double prev = cur.cost;
            // same safeguard as the estimator: a pass that raises the cost ends the loop
            if (config.est.reject_increase && next.cost > prev + zeta)
            {
                res.converged = true;
                break;
            }
            res.cost_history.push_back(next.cost);
            cur = std::move(next);
            if (cur.cost < best.cost)
                best = cur;
            if (std::abs(cur.cost - prev) <= zeta)
            {
                res.converged = true;
                break;
            }
        }

        const Iterate &pick = res.converged ? cur : best;
        res.d_hat = pick.d;
        res.theta_hat = pick.theta;
        res.phn_last = pick.last;
        res.cost = pick.cost;
        return res;
    }

    std::vector<DetectionResult> detect_packet(const CVec &r_stream, const EcmEstimate &ecm, const SimConfig &config,
                                               const DftOperators &ops, const Constellation &qam)
    {
        const int n = config.n_subcarriers, cp = config.cp_len;
        if (r_stream.size() != config.packet_len())
            throw ArgumentError("detect_packet: stream length does not match the packet layout");
        std::vector<DetectionResult> out;
        out.reserve(static_cast<size_t>(config.n_data_symbols));
        EkfState carry = ecm.phn_last;
        for (int m = 1; m <= config.n_data_symbols; ++m)
        {
            CVec y = derotate_cfo(symbol_samples(r_stream, m, n, cp), ecm.eps_hat, ramp_offset(m, n, cp));
            out.push_back(detect_symbol(y, ecm.h_hat, carry, config, ops, qam));
            carry = out.back().phn_last;
        }
        return out;
    }
}

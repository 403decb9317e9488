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

#include "ofdm/ecm.hpp"
#include "ofdm/op_counter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ofdm
{
    EkfTrack ekf_track(const CVec &y, const CVec &s_ref, double phn_var, double noise_var, EkfState init,
                       GainVariant gain)
    {
        Eigen::Index n = y.size();
        if (s_ref.size() != n || n < 1)
            throw ArgumentError("ekf_track: y and s_ref must have the same nonzero length");
        if (phn_var < 0.0 || noise_var < 0.0 || init.m_cov < 0.0)
            throw ArgumentError("ekf_track: negative variance");

        EkfTrack tr;
        tr.theta.resize(n);
        tr.m_post.resize(n);
        tr.m_pred.resize(n);

        double th_p = init.theta_hat, m_p = init.m_cov;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            cplx rot = cis(th_p);
            cplx zdot = imag_j * rot * s_ref(i);
            double m_gain = m_p;
            if (gain == GainVariant::Printed)
                m_gain = std::max(m_p - phn_var, 0.0);
            double den = std::norm(zdot) * m_gain + noise_var;
            if (den < 1e-30)
            {
                den = 1e-30;
                tr.gain_clamped = true;
            }
            cplx k = m_p * std::conj(zdot) / den;
            double th = th_p + (k * (y(i) - rot * s_ref(i))).real();
            double m = (m_p - k * zdot * m_p).real();
            m = std::max(m, 0.0);

            tr.theta(i) = th;
            tr.m_post(i) = m;
            tr.m_pred(i) = m_p;
            th_p = th;
            m_p = m + phn_var;
        }
        count_ops(static_cast<std::uint64_t>(6 * n), static_cast<std::uint64_t>(4 * n));
        return tr;
    }

    CfoStep cfo_update(const CVec &r, const CVec &S_hat, double eps_prev, double cfo_lo, double cfo_hi, bool profile_phase)
    {
        Eigen::Index n = r.size();
        if (S_hat.size() != n || n < 1)
            throw ArgumentError("cfo_update: length mismatch");

        std::vector<cplx> q(static_cast<size_t>(n));
        double s0 = 0.0, s1 = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            q[i] = std::conj(r(i)) * S_hat(i) * cis(two_pi * eps_prev * double(i) / double(n));
            s0 += q[i].real();
            s1 += double(i) * q[i].real();
        }
        // ramp origin; with profile_phase the step is joint Newton in (eps, common phase)
        double c = profile_phase && s0 > 0.0 ? s1 / s0 : 0.0;

        double num = 0.0, den = 0.0, scale = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            double fi = double(i) - c;
            num += fi * q[i].imag();
            den += fi * fi * q[i].real();
            scale += fi * fi * std::abs(r(i)) * std::abs(S_hat(i));
        }
        count_ops(static_cast<std::uint64_t>(3 * n), static_cast<std::uint64_t>(3 * n));

        CfoStep st;
        st.eps = eps_prev;
        if (!(std::abs(den) >= 1e-12 * scale) || scale == 0.0)
        {
            st.ill_posed = true;
            return st;
        }
        double next = eps_prev - double(n) / two_pi * num / den;
        double lo = std::nextafter(cfo_lo, cfo_hi), hi = std::nextafter(cfo_hi, cfo_lo);
        if (!(next > lo) || !(next < hi))
        {
            st.clamped = true;
            next = std::isnan(next) ? eps_prev : std::clamp(next, lo, hi);
        }
        st.eps = next;
        return st;
    }

    TrainingModel::TrainingModel(const CVec &pilots, const DftOperators &ops)
        : pilots_(pilots), gamma_(ops.gamma(pilots))
    {
        CMat gram = gamma_.adjoint() * gamma_;
        gram_.compute(gram);
        double diag_max = gram.diagonal().real().maxCoeff();
        bool ok = gram_.info() == Eigen::Success && diag_max > 0.0;
        if (ok)
        {
            // smallest pivot relative to the largest diagonal entry
            double piv = gram_.matrixLLT().diagonal().real().minCoeff();
            ok = piv * piv > 1e-10 * diag_max;
        }
        if (!ok)
            throw DegenerateTrainingError("training symbol does not identify the channel (Gamma rank deficient)");
    }

    CVec TrainingModel::synth(const CVec &h) const
    {
        count_ops(static_cast<std::uint64_t>(gamma_.size()), static_cast<std::uint64_t>(gamma_.rows() * (gamma_.cols() - 1)));
        return gamma_ * h;
    }

    CVec TrainingModel::ls(const CVec &z) const
    {
        if (z.size() != gamma_.rows())
            throw ArgumentError("ls: length mismatch");
        count_ops(static_cast<std::uint64_t>(gamma_.size() + gamma_.cols() * gamma_.cols()),
                  static_cast<std::uint64_t>(gamma_.cols() * (gamma_.rows() - 1 + gamma_.cols())));
        return gram_.solve(gamma_.adjoint() * z);
    }

    CVec derotate_cfo(const CVec &r, double eps, long ramp_offset)
    {
        Eigen::Index n = r.size();
        CVec y(n);
        for (Eigen::Index i = 0; i < n; ++i)
            y(i) = cis(-two_pi * eps * double(i + ramp_offset) / double(n)) * r(i);
        count_ops(static_cast<std::uint64_t>(n), 0);
        return y;
    }

    CVec ls_channel(const CVec &r, double eps_hat, const RVec &theta_hat, const TrainingModel &model)
    {
        if (r.size() != model.n() || theta_hat.size() != model.n())
            throw ArgumentError("ls_channel: length mismatch");
        CVec z = derotate_cfo(r, eps_hat);
        for (Eigen::Index i = 0; i < z.size(); ++i)
            z(i) *= cis(-theta_hat(i));
        return model.ls(z);
    }

    CVec ls_channel(const CVec &r, double eps_hat, const RVec &theta_hat, const CVec &d, int n, int l)
    {
        DftOperators ops(n, l);
        return ls_channel(r, eps_hat, theta_hat, TrainingModel(d, ops));
    }

    double residual_cost(const CVec &y, const RVec &theta, const CVec &s)
    {
        double c = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            c += std::norm(y(i) - cis(theta(i)) * s(i));
        return c;
    }

    std::vector<double> cfo_grid(const SimConfig &config)
    {
        double step = config.est.grid_step;
        long k0 = static_cast<long>(std::ceil(config.cfo_lo / step));
        long k1 = static_cast<long>(std::floor(config.cfo_hi / step));
        std::vector<double> grid;
        for (long k = k0; k <= k1; ++k)
        {
            double e = double(k) * step;
            if (e > config.cfo_lo && e < config.cfo_hi)
                grid.push_back(e);
        }
        if (grid.empty())
            grid.push_back(0.5 * (config.cfo_lo + config.cfo_hi));
        return grid;
    }

    EcmInit initialize(const CVec &r, const TrainingModel &model, const SimConfig &config)
    {
        if (r.size() != model.n())
            throw ArgumentError("initialize: length mismatch");
        EcmInit best;
        best.cost = std::numeric_limits<double>::infinity();
        for (double e : cfo_grid(config))
        {
            CVec z = derotate_cfo(r, e);
            CVec h = model.ls(z);
            double c = (z - model.synth(h)).squaredNorm();
            if (c < best.cost || (c == best.cost && std::abs(e) < std::abs(best.eps0)))
            {
                best.cost = c;
                best.eps0 = e;
                best.h0 = h;
            }
        }
        return best;
    }

    EcmEstimate ecm_estimate(const CVec &r, const TrainingModel &model, const SimConfig &config)
    {
        const Eigen::Index n = model.n();
        if (r.size() != n)
            throw ArgumentError("ecm_estimate: length mismatch");
        const double zeta = stop_threshold(config, r.squaredNorm());

        EcmInit init = initialize(r, model, config);
        EcmEstimate out;
        out.eps_init = init.eps0;
        out.eps_hat = init.eps0;
        out.h_hat = init.h0;
        out.theta_hat = RVec::Zero(n);
        out.phn_last = {0.0, 0.0};
        out.final_cost = init.cost;
        out.cost_history.push_back(init.cost);

        for (int it = 1; it <= config.est.ecm_max_iters; ++it)
        {
            // E-step: fresh EKF pass, theta_0 pinned to zero
            CVec y = derotate_cfo(r, out.eps_hat);
            CVec s = model.synth(out.h_hat);
            EkfTrack tr = ekf_track(y, s, config.phn_var, config.noise_var, {0.0, 0.0}, config.est.gain);
            out.gain_clamped |= tr.gain_clamped;

            // M-step: CFO, then channel
            CVec S(n);
            for (Eigen::Index i = 0; i < n; ++i)
                S(i) = cis(tr.theta(i)) * s(i);
            CfoStep st = cfo_update(r, S, out.eps_hat, config.cfo_lo, config.cfo_hi, config.est.cfo_phase_profile);
            out.newton_skipped |= st.ill_posed;
            out.cfo_edge |= st.clamped;

            CVec h = ls_channel(r, st.eps, tr.theta, model);
            double cost = residual_cost(derotate_cfo(r, st.eps), tr.theta, model.synth(h));
            out.iters = it;
            const double prev = out.final_cost;

            // an approximate step that raises the cost ends the search at the previous iterate
            if (config.est.reject_increase && cost > prev + zeta)
            {
                out.converged = true;
                break;
            }
            out.eps_hat = st.eps;
            out.theta_hat = tr.theta;
            out.phn_last = tr.last();
            out.h_hat = h;
            out.final_cost = cost;
            out.cost_history.push_back(cost);
            if (std::abs(cost - prev) <= zeta)
            {
                out.converged = true;
                break;
            }
        }
        return out;
    }

    EcmEstimate ecm_estimate(const CVec &r, const CVec &d, const SimConfig &config)
    {
        config.validate();
        DftOperators ops(config.n_subcarriers, config.n_taps);
        return ecm_estimate(r, TrainingModel(d, ops), config);
    }
}

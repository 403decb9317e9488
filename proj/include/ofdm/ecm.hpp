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
#include "ofdm/signal_model.hpp"

#include <vector>

namespace ofdm
{
    // Scalar EKF state. ekf_track takes the predicted state of the first sample.
    struct EkfState
    {
        double theta_hat = 0.0;
        double m_cov = 0.0;
    };

    struct EkfTrack
    {
        RVec theta;  // posterior theta_{n|n}
        RVec m_post; // M_{n|n}
        RVec m_pred; // M_{n|n-1}
        bool gain_clamped = false;

        EkfState last() const { return {theta(theta.size() - 1), m_post(m_post.size() - 1)}; }
    };

    // d/dtheta of e^{j theta} s
    inline cplx ekf_jacobian(double theta, cplx s) { return imag_j * cis(theta) * s; }

    EkfTrack ekf_track(const CVec &y, const CVec &s_ref, double phn_var, double noise_var, EkfState init,
                       GainVariant gain = GainVariant::Standard);

    struct CfoStep
    {
        double eps = 0.0;
        bool ill_posed = false; // Newton denominator vanished, eps unchanged
        bool clamped = false;   // hit the edge of the range
    };

    // One Newton step on sum |r_n - e^{j 2 pi eps n/N} S_n|^2 from eps_prev.
    // profile_phase: step jointly in eps and a common phase of S (ramp index
    // centred on the weighted centroid), which the channel update absorbs anyway.
    CfoStep cfo_update(const CVec &r, const CVec &S_hat, double eps_prev, double cfo_lo = -0.5, double cfo_hi = 0.5,
                       bool profile_phase = false);

    // Gamma = F^H D V for one pilot vector, with its Gram factorization
    class TrainingModel
    {
    public:
        TrainingModel(const CVec &pilots, const DftOperators &ops); // throws DegenerateTrainingError

        int n() const { return static_cast<int>(gamma_.rows()); }
        int l() const { return static_cast<int>(gamma_.cols()); }
        const CVec &pilots() const { return pilots_; }
        const CMat &gamma() const { return gamma_; }

        CVec synth(const CVec &h) const;  // Gamma h
        CVec ls(const CVec &z) const;     // (Gamma^H Gamma)^{-1} Gamma^H z

    private:
        CVec pilots_;
        CMat gamma_;
        Eigen::LLT<CMat> gram_;
    };

    // e^{-j 2 pi eps (n + offset)/N} r_n
    CVec derotate_cfo(const CVec &r, double eps, long ramp_offset = 0);

    CVec ls_channel(const CVec &r, double eps_hat, const RVec &theta_hat, const TrainingModel &model);
    CVec ls_channel(const CVec &r, double eps_hat, const RVec &theta_hat, const CVec &d, int n, int l);

    struct EcmInit
    {
        double eps0 = 0.0;
        CVec h0;
        double cost = 0.0;
    };

    // Exhaustive CFO grid (multiples of grid_step strictly inside the range) with theta = 0
    EcmInit initialize(const CVec &r, const TrainingModel &model, const SimConfig &config);
    std::vector<double> cfo_grid(const SimConfig &config);

    struct EcmEstimate
    {
        CVec h_hat;
        double eps_hat = 0.0;
        RVec theta_hat;
        EkfState phn_last; // posterior at the last training sample
        int iters = 0;
        double final_cost = 0.0;
        bool converged = false;

        double eps_init = 0.0;
        std::vector<double> cost_history; // initialization cost, then one entry per iteration
        bool cfo_edge = false;
        bool newton_skipped = false;
        bool gain_clamped = false;
    };

    EcmEstimate ecm_estimate(const CVec &r, const TrainingModel &model, const SimConfig &config);
    EcmEstimate ecm_estimate(const CVec &r, const CVec &d, const SimConfig &config);

    // sum |y_n - e^{j theta_n} s_n|^2
    double residual_cost(const CVec &y, const RVec &theta, const CVec &s);
}

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
#include "ofdm/ecm.hpp"
#include "ofdm/qam.hpp"
#include "ofdm/signal_model.hpp"

#include <vector>

namespace ofdm
{
    struct DetectionResult
    {
        CVec d_hat;      // hard decisions
        RVec theta_hat;  // PHN track used for d_hat
        EkfState phn_last;
        int iters = 0;   // EKF passes
        bool converged = false;
        double cost = 0.0;
        std::vector<double> cost_history; // constant-phase start, then one entry per pass
    };

    // Regularized per-subcarrier equalizer, freq = V h (channel frequency response)
    CVec equalize_freq(const CVec &y, const CVec &freq, const RVec &theta_hat, double noise_var, const DftOperators &ops);
    CVec equalize(const CVec &y, const CVec &h_hat, const RVec &theta_hat, double noise_var, const DftOperators &ops);

    // y is CFO-compensated; phn_prev is the last posterior of the previous symbol
    DetectionResult detect_symbol(const CVec &y, const CVec &h_hat, EkfState phn_prev, const SimConfig &config,
                                  const DftOperators &ops, const Constellation &qam);

    // All data symbols of a received stream (training symbol first)
    std::vector<DetectionResult> detect_packet(const CVec &r_stream, const EcmEstimate &ecm, const SimConfig &config,
                                               const DftOperators &ops, const Constellation &qam);
}

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

namespace ofdm
{
    // Wiener prior on theta_1..theta_{N-1}, in units of 1/phn_var
    enum class PhnPrior
    {
        Anchored, // diag [2, ..., 2, 1], off-diagonal -1 (theta_0 = 0 is known)
        Printed   // diag [1, 2, ..., 2, 1], off-diagonal -1
    };

    // Real symmetric (N+2L) x (N+2L) matrix; parameter order
    // [theta_1 .. theta_{N-1}, Re h (L), Im h (L), eps]
    struct HybridInfoMatrix
    {
        RMat B;
        int n = 0;
        int l = 0;

        Eigen::Index theta_offset() const { return 0; }
        Eigen::Index re_offset() const { return n - 1; }
        Eigen::Index im_offset() const { return n - 1 + l; }
        Eigen::Index cfo_index() const { return n - 1 + 2 * l; }
    };

    struct HcrbReport
    {
        RVec phn_bound;        // per-sample, theta_1 .. theta_{N-1}
        double phn_mean = 0.0; // average of phn_bound
        double channel_bound = 0.0;
        double cfo_bound = 0.0;
        double condition = 0.0; // estimate of cond(B)
    };

    // h is the CIR in the same convention as the signal model (frequency response V h).
    // The matrix does not depend on eps or theta; eps is accepted for interface symmetry.
    HybridInfoMatrix build_him(const CVec &d, const CVec &h, double eps, double phn_var, double noise_var,
                               int n, int l, PhnPrior prior = PhnPrior::Anchored);

    // Prior block (1/phn_var) * tridiag, size (N-1) x (N-1)
    RMat phn_prior_block(int n, double phn_var, PhnPrior prior);

    HcrbReport hcrb_report(const HybridInfoMatrix &him, double max_condition = 1e12);

    struct ClosedFormN2
    {
        double cir_bound;
        double cfo_bound;
    };

    // N = 2, L = 1. h is the single tap in the signal model convention; the bound on
    // the physical tap is returned (the normalized-DFT form scaled by 1/N).
    ClosedFormN2 closed_form_hcrb_n2(cplx d1, cplx d2, cplx h, double noise_var, double phn_var);
}

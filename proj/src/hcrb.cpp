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

#include "ofdm/hcrb.hpp"
#include "ofdm/signal_model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ofdm
{
    namespace
    {
        bool finite(const CVec &v) { return v.allFinite(); }
    }

    RMat phn_prior_block(int n, double phn_var, PhnPrior prior)
    {
        int m = n - 1;
        RMat P = RMat::Zero(m, m);
        if (m == 0)
            return P;
        double g = 1.0 / phn_var;
        for (int i = 0; i < m; ++i)
        {
            P(i, i) = 2.0 * g;
            if (i + 1 < m)
                P(i, i + 1) = P(i + 1, i) = -g;
        }
        P(m - 1, m - 1) = g;
        if (prior == PhnPrior::Printed)
            P(0, 0) = g;
        return P;
    }

    HybridInfoMatrix build_him(const CVec &d, const CVec &h, double eps, double phn_var, double noise_var,
                               int n, int l, PhnPrior prior)
    {
        if (n < 2 || l < 1 || l > n)
            throw ArgumentError("build_him: need N >= 2 and 1 <= L <= N");
        if (d.size() != n || h.size() != l)
            throw ArgumentError("build_him: dimension mismatch");
        if (!finite(d) || !finite(h) || !std::isfinite(eps) || !std::isfinite(phn_var) || !std::isfinite(noise_var))
            throw ArgumentError("build_him: non-finite input");
        if (!(noise_var > 0.0))
            throw ArgumentError("build_him: noise_var must be > 0");
        if (phn_var < 0.0)
            throw ArgumentError("build_him: negative phn_var");
        if (phn_var == 0.0)
            throw NumericalError("prior information singular (phn_var = 0)");

        DftOperators ops(n, l);
        CMat G = ops.gamma(d);
        CVec s = G * h;
        CVec q5(n);
        for (int i = 0; i < n; ++i)
            q5(i) = (two_pi * i / n) * s(i);

        HybridInfoMatrix him;
        him.n = n;
        him.l = l;
        int dim = n + 2 * l;
        RMat &B = him.B;
        B = RMat::Zero(dim, dim);
        const Eigen::Index ro = him.re_offset(), io = him.im_offset(), ce = him.cfo_index();

        // theta block and its couplings (theta_0 excluded)
        for (int i = 1; i < n; ++i)
        {
            Eigen::Index t = i - 1;
            B(t, t) = std::norm(s(i));
            for (int k = 0; k < l; ++k)
            {
                cplx c = std::conj(s(i)) * G(i, k);
                B(t, ro + k) = (-imag_j * c).real();
                B(t, io + k) = c.real();
            }
            B(t, ce) = (two_pi * i / n) * std::norm(s(i));
        }

        CMat GG = G.adjoint() * G;
        CVec gq = G.adjoint() * q5;
        B.block(ro, ro, l, l) = GG.real();
        B.block(io, io, l, l) = GG.real();
        B.block(ro, io, l, l) = (imag_j * GG).real();
        for (int k = 0; k < l; ++k)
        {
            B(ro + k, ce) = (imag_j * gq(k)).real();
            B(io + k, ce) = gq(k).real();
        }
        B(ce, ce) = q5.squaredNorm();

        B = RMat(B.selfadjointView<Eigen::Upper>()) * (2.0 / noise_var);

        B.topLeftCorner(n - 1, n - 1) += phn_prior_block(n, phn_var, prior);
        return him;
    }

    HcrbReport hcrb_report(const HybridInfoMatrix &him, double max_condition)
    {
        const RMat &B = him.B;
        Eigen::Index dim = B.rows();
        if (dim != B.cols() || dim != him.n + 2 * him.l)
            throw ArgumentError("hcrb_report: matrix size does not match (N, L)");
        if (!B.allFinite())
            throw ArgumentError("hcrb_report: non-finite matrix");

        Eigen::LDLT<RMat> ldlt(B);
        double rc = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
        double cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(cond <= max_condition))
            throw NumericalError("hybrid information matrix singular or ill-conditioned (cond ~ " +
                                     std::to_string(cond) + ")",
                                 cond);
        // rcond only bounds the pivots; reject an indefinite factor explicitly
        if ((ldlt.vectorD().array() <= 0.0).any())
            throw NumericalError("hybrid information matrix is not positive definite", cond);

        RMat omega = ldlt.solve(RMat::Identity(dim, dim));
        HcrbReport rep;
        rep.condition = cond;
        rep.phn_bound = omega.diagonal().head(him.n - 1);
        rep.phn_mean = him.n > 1 ? rep.phn_bound.mean() : 0.0;
        rep.channel_bound = omega.diagonal().segment(him.re_offset(), 2 * him.l).sum();
        rep.cfo_bound = omega(him.cfo_index(), him.cfo_index());
        return rep;
    }

    ClosedFormN2 closed_form_hcrb_n2(cplx d1, cplx d2, cplx h, double noise_var, double phn_var)
    {
        constexpr double N = 2.0;
        double alpha = std::norm(d1 + d2 * cis(two_pi / N));
        double gamma = std::norm(d1 + d2);
        double scale = 1e-12 * (std::norm(d1) + std::norm(d2));
        if (!(alpha > scale) || !(gamma > scale))
            throw DegenerateTrainingError("closed_form_hcrb_n2: degenerate training (alpha or gamma is zero)");
        if (!(std::norm(h) > 0.0))
            throw ArgumentError("closed_form_hcrb_n2: zero channel");

        // normalized-DFT tap h_A = sqrt(N) h
        double ha2 = N * std::norm(h);
        double cir_a = (2.0 * gamma + alpha) * N * N * noise_var / (2.0 * (alpha + gamma) * gamma);
        double cfo = N * N * ((alpha + gamma) * N * N * noise_var + 2.0 * gamma * alpha * ha2 * phn_var) /
                     (8.0 * alpha * gamma * ha2 * std::numbers::pi * std::numbers::pi);
        return {cir_a / N, cfo};
    }
}

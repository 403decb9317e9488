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

#include "ofdm/complexity.hpp"

namespace ofdm
{
    using u64 = std::uint64_t;

    ComplexityReport complexity_proposed_est(u64 N, u64 L, u64 t_ecm, u64 t_init)
    {
        // s_n = F^H D W h evaluated directly
        const u64 s_mul = N * (N * N + L * (N + 1));
        const u64 s_add = N * (N - 1) * (L + 1) + N * (L - 1);

        ComplexityReport c;
        c.mults = (N + 5 * N + 2 * N + 2 * N + 7 * N + L * N * (2 * N + 1) + s_mul) * t_ecm +
                  (3 * N + L * N * (2 * N + 1) + s_mul) * t_init +
                  N * N * (N + L);
        c.adds = (N + N + 2 * N + N + (2 * N + 1) + L * (N - 1) * (2 * N + 1) + s_add) * t_ecm +
                 (2 * N + L * (N - 1) * (2 * N + 1) + s_add) * t_init +
                 N * (N - 1) * (N + L);
        c.n = N, c.l = L, c.t_ecm = t_ecm, c.t_init = t_init;
        return c;
    }

    ComplexityReport complexity_proposed_det(u64 N, u64 L, u64 t_det)
    {
        const u64 s_mul = N * (N * N + L * (N + 1));
        const u64 s_add = N * (N - 1) * (L + 1) + N * (L - 1);
        const u64 eq_mul = N * N * (5 * N + 1);
        const u64 eq_add = N * (N * N + N * (N - 1) * (4 * N + 1));

        ComplexityReport c;
        c.mults = (N + 5 * N + 2 * N + 2 * N + s_mul + eq_mul) * t_det + eq_mul + N * L;
        c.adds = (N + N + 2 * N + N + s_add + eq_add) * t_det + eq_add + N * (L - 1);
        c.n = N, c.l = L, c.t_det = t_det;
        return c;
    }

    ComplexityReport complexity_baseline_est(u64 N, u64 L, u64 t8)
    {
        ComplexityReport c;
        c.mults = (N * N * (11 * N + 7) + 2 * N) * t8 + N * N * (9 * N + 4 * L + 1) + L * N;
        c.adds = (2 * N * N * N + (N - 1) * (9 * N * N + 7 * N + 2) + 1) * t8 + 2 * N * N * N +
                 (N - 1) * (N * (7 * N + 4 * L + 1) + L);
        c.n = N, c.l = L, c.t8 = t8;
        return c;
    }

    ComplexityReport complexity_baseline_det(u64 N, u64 t20)
    {
        ComplexityReport c;
        c.mults = N * N * (11 * N + 6) * t20 + N * N * (6 * N + 1);
        c.adds = (N * (N - 1) * (9 * N + 6) + N * N * (2 * N + 1)) * t20 + N * N * (6 * N - 5) + N * (N - 1);
        c.n = N, c.t20 = t20;
        return c;
    }

    ComplexityReport complexity_baseline(u64 N, u64 L, u64 t8, u64 t20)
    {
        ComplexityReport e = complexity_baseline_est(N, L, t8);
        ComplexityReport d = complexity_baseline_det(N, t20);
        ComplexityReport c;
        c.mults = e.mults + d.mults;
        c.adds = e.adds + d.adds;
        c.n = N, c.l = L, c.t8 = t8, c.t20 = t20;
        return c;
    }

    ComplexityReport complexity_proposed(u64 N, u64 L, u64 t_ecm, u64 t_init, u64 t_det)
    {
        ComplexityReport e = complexity_proposed_est(N, L, t_ecm, t_init);
        ComplexityReport d = complexity_proposed_det(N, L, t_det);
        ComplexityReport c;
        c.mults = e.mults + d.mults;
        c.adds = e.adds + d.adds;
        c.n = N, c.l = L, c.t_ecm = t_ecm, c.t_init = t_init, c.t_det = t_det;
        return c;
    }

    double complexity_ratio(const ComplexityReport &baseline, const ComplexityReport &proposed)
    {
        return proposed.total() == 0 ? 0.0 : double(baseline.total()) / double(proposed.total());
    }
}

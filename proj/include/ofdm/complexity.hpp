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

#include <cstdint>

namespace ofdm
{
    // Complex multiplication / addition counts of the analytic cost model
    struct ComplexityReport
    {
        std::uint64_t mults = 0;
        std::uint64_t adds = 0;
        std::uint64_t total() const { return mults + adds; }

        // parameter echo
        std::uint64_t n = 0, l = 0;
        std::uint64_t t_ecm = 0, t_init = 0, t_det = 0, t8 = 0, t20 = 0;
    };

    ComplexityReport complexity_proposed_est(std::uint64_t n, std::uint64_t l, std::uint64_t t_ecm, std::uint64_t t_init);
    ComplexityReport complexity_proposed_det(std::uint64_t n, std::uint64_t l, std::uint64_t t_det);

    // Joint-MAP estimator with exhaustive CFO search plus its iterative detector
    ComplexityReport complexity_baseline_est(std::uint64_t n, std::uint64_t l, std::uint64_t t8);
    ComplexityReport complexity_baseline_det(std::uint64_t n, std::uint64_t t20);
    ComplexityReport complexity_baseline(std::uint64_t n, std::uint64_t l, std::uint64_t t8, std::uint64_t t20);

    // Estimator on the training symbol plus one data-symbol detection
    ComplexityReport complexity_proposed(std::uint64_t n, std::uint64_t l, std::uint64_t t_ecm, std::uint64_t t_init,
                                         std::uint64_t t_det);

    double complexity_ratio(const ComplexityReport &baseline, const ComplexityReport &proposed);
}

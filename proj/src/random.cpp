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

#include "ofdm/random.hpp"

#include <cmath>

namespace ofdm
{
    Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
    {
        auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
        auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
        std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(index), hi(index)};
        return Rng(seq);
    }

    double real_normal(Rng &rng, double var)
    {
        if (var <= 0.0)
            return 0.0;
        std::normal_distribution<double> nd(0.0, std::sqrt(var));
        return nd(rng);
    }

    cplx complex_normal(Rng &rng, double var)
    {
        if (var <= 0.0)
            return {0.0, 0.0};
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * var));
        double re = nd(rng);
        double im = nd(rng);
        return {re, im};
    }

    CVec complex_normal_vec(Rng &rng, Eigen::Index n, double var)
    {
        CVec v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = complex_normal(rng, var);
        return v;
    }
}

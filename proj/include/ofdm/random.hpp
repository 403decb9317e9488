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

#include <cstdint>
#include <random>

namespace ofdm
{
    using Rng = std::mt19937_64;

    // Independent generator for (seed, stream, index); streams separate the use (pilots, trials, ...)
    Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0);

    double real_normal(Rng &rng, double var);

    // Circularly symmetric CN(0, var)
    cplx complex_normal(Rng &rng, double var);

    CVec complex_normal_vec(Rng &rng, Eigen::Index n, double var);
}

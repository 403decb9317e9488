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
#include <vector>

namespace ofdm
{
    // Unit-energy QAM alphabet with hard-decision slicer.
    // Supported orders: 4, 16, 64, 256 (square, per-axis Gray) and 128 (cross).
    // Labels are read from the bit stream MSB first; the first half of the bits
    // (first 3 for 128-QAM) select the in-phase level.
    class Constellation
    {
    public:
        explicit Constellation(int order);

        int order() const { return order_; }
        int bits_per_symbol() const { return bps_; }
        const CVec &points() const { return points_; } // indexed by label
        cplx point(unsigned label) const { return points_(label); }

        unsigned nearest(cplx z) const;
        cplx slice(cplx z) const { return points_(nearest(z)); }
        CVec slice(const CVec &z) const;

        CVec map(const std::vector<std::uint8_t> &bits) const;
        std::vector<std::uint8_t> demap(const CVec &z) const;

    private:
        int order_;
        int bps_;
        int grid_;        // number of odd-integer levels per axis of the slicing grid
        double scale_;    // unnormalized -> unit energy
        CVec points_;
        std::vector<int> table_; // grid cell -> label, -1 if empty
    };

    CVec qam_mod(const std::vector<std::uint8_t> &bits, int order);
    std::vector<std::uint8_t> qam_hard_slice(const CVec &symbols, int order);
}

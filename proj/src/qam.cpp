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

#include "ofdm/qam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ofdm
{
    namespace
    {
        unsigned gray_decode(unsigned g)
        {
            unsigned b = g;
            for (unsigned s = g >> 1; s != 0; s >>= 1)
                b ^= s;
            return b;
        }

        // Gray label -> odd amplitude in [-(m-1), m-1]
        int gray_level(unsigned g, int m) { return 2 * static_cast<int>(gray_decode(g)) - (m - 1); }

        int sgn(int v) { return v < 0 ? -1 : 1; }
    }

    Constellation::Constellation(int order) : order_(order)
    {
        switch (order)
        {
        case 4: bps_ = 2; break;
        case 16: bps_ = 4; break;
        case 64: bps_ = 6; break;
        case 128: bps_ = 7; break;
        case 256: bps_ = 8; break;
        default:
            throw ConfigError("unsupported constellation order " + std::to_string(order));
        }

        std::vector<std::pair<int, int>> raw(order);
        if (order == 128)
        {
            // 16 x 8 rectangle; columns beyond |x| = 11 fold onto the top and bottom arms
            grid_ = 12;
            for (unsigned lab = 0; lab < 128u; ++lab)
            {
                int yi = gray_level(lab >> 4, 8);
                int xq = gray_level(lab & 15u, 16);
                if (std::abs(xq) <= 11)
                    raw[lab] = {xq, yi};
                else
                    raw[lab] = {sgn(xq) * std::abs(yi), sgn(yi) * (std::abs(xq) - 4)};
            }
        }
        else
        {
            int k = bps_ / 2;
            int m = 1 << k;
            grid_ = m;
            unsigned mask = (1u << k) - 1u;
            for (unsigned lab = 0; lab < static_cast<unsigned>(order); ++lab)
                raw[lab] = {gray_level(lab >> k, m), gray_level(lab & mask, m)};
        }

        double energy = 0.0;
        for (auto [x, y] : raw)
            energy += double(x) * x + double(y) * y;
        energy /= order;
        scale_ = 1.0 / std::sqrt(energy);

        points_.resize(order);
        table_.assign(static_cast<size_t>(grid_) * grid_, -1);
        for (int lab = 0; lab < order; ++lab)
        {
            auto [x, y] = raw[lab];
            points_(lab) = cplx(x * scale_, y * scale_);
            int ix = (x + grid_ - 1) / 2, iy = (y + grid_ - 1) / 2;
            table_[static_cast<size_t>(ix) * grid_ + iy] = lab;
        }
    }

    unsigned Constellation::nearest(cplx z) const
    {
        auto cell = [&](double u)
        {
            double idx = std::round((u / scale_ + (grid_ - 1)) * 0.5);
            if (!(idx >= 0.0)) // also catches NaN
                return 0;
            return std::min(static_cast<int>(idx), grid_ - 1);
        };
        int lab = table_[static_cast<size_t>(cell(z.real())) * grid_ + cell(z.imag())];
        if (lab >= 0)
            return static_cast<unsigned>(lab);

        // Empty corner cell of the cross constellation
        unsigned best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < points_.size(); ++i)
        {
            double d = std::norm(z - points_(i));
            if (d < best_d)
                best_d = d, best = static_cast<unsigned>(i);
        }
        return best;
    }

    CVec Constellation::slice(const CVec &z) const
    {
        CVec out(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i)
            out(i) = slice(z(i));
        return out;
    }

    CVec Constellation::map(const std::vector<std::uint8_t> &bits) const
    {
        if (bits.size() % static_cast<size_t>(bps_) != 0)
            throw ArgumentError("bit count is not a multiple of bits per symbol");
        Eigen::Index n = static_cast<Eigen::Index>(bits.size() / bps_);
        CVec out(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            unsigned lab = 0;
            for (int b = 0; b < bps_; ++b)
                lab = (lab << 1) | (bits[static_cast<size_t>(i * bps_ + b)] & 1u);
            out(i) = points_(lab);
        }
        return out;
    }

    std::vector<std::uint8_t> Constellation::demap(const CVec &z) const
    {
        std::vector<std::uint8_t> bits(static_cast<size_t>(z.size()) * bps_);
        for (Eigen::Index i = 0; i < z.size(); ++i)
        {
            unsigned lab = nearest(z(i));
            for (int b = 0; b < bps_; ++b)
                bits[static_cast<size_t>(i * bps_ + b)] = (lab >> (bps_ - 1 - b)) & 1u;
        }
        return bits;
    }

    CVec qam_mod(const std::vector<std::uint8_t> &bits, int order) { return Constellation(order).map(bits); }

    std::vector<std::uint8_t> qam_hard_slice(const CVec &symbols, int order) { return Constellation(order).demap(symbols); }
}

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
    // Complex multiply / add tallies of the live estimator and detector
    struct OpCounts
    {
        std::uint64_t mults = 0;
        std::uint64_t adds = 0;
        std::uint64_t total() const { return mults + adds; }
    };

    namespace detail
    {
        extern thread_local bool op_counting;
        extern thread_local OpCounts op_tally;
    }

    inline void count_ops(std::uint64_t mults, std::uint64_t adds)
    {
        if (detail::op_counting)
        {
            detail::op_tally.mults += mults;
            detail::op_tally.adds += adds;
        }
    }

    // Tallies of the calling thread since the last reset
    OpCounts runtime_counters();
    bool counters_enabled();
    void set_counters_enabled(bool enabled);
    void reset_counters();

    // Enables counting on this thread for its lifetime, starting from zero
    class OpCounterScope
    {
    public:
        OpCounterScope();
        ~OpCounterScope();
        OpCounterScope(const OpCounterScope &) = delete;
        OpCounterScope &operator=(const OpCounterScope &) = delete;

        OpCounts counts() const { return runtime_counters(); }

    private:
        bool previous_;
    };
}

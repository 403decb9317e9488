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

#include "ofdm/op_counter.hpp"

namespace ofdm
{
    namespace detail
    {
        thread_local bool op_counting = false;
        thread_local OpCounts op_tally{};
    }

    OpCounts runtime_counters() { return detail::op_tally; }
    bool counters_enabled() { return detail::op_counting; }
    void set_counters_enabled(bool enabled) { detail::op_counting = enabled; }
    void reset_counters() { detail::op_tally = OpCounts{}; }

    OpCounterScope::OpCounterScope() : previous_(detail::op_counting)
    {
        reset_counters();
        detail::op_counting = true;
    }

    OpCounterScope::~OpCounterScope() { detail::op_counting = previous_; }
}

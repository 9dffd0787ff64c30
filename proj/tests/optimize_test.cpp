// Copyright 2026 The swapsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "swapsim/optimize.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "swapsim/pipeline.hpp"
#include "test_util.hpp"

using namespace swapsim;
using namespace swapsim::modes;

namespace {

const PipelineResult& apparatus() {
    static const PipelineResult r = [] {
        PipelineOptions o;
        o.pdc.xi = 0.1;
        o.pdc.order = 2;
        return run_pipeline(o);
    }();
    return r;
}

FidelitySearchOptions quick(int restarts = 8) {
    FidelitySearchOptions o;
    o.restarts = restarts;
    return o;
}

}  // namespace

TEST(Unitaries, ParameterizationsAreUnitary) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> angle(-4.0, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<double, 4> a2{};
        std::array<double, 16> a4{};
        for (auto& v : a2) {
            v = angle(rng);
        }
        for (auto& v : a4) {
            v = angle(rng);
        }
        EXPECT_LE(u2_from_angles(a2).unitarity_defect(), 1e-12);
        EXPECT_LE(u4_from_angles(a4).unitarity_defect(), 1e-12);
    }
    const std::array<double, 16> zero{};
    EXPECT_LE(max_abs_diff(u4_from_angles(zero), Matrix::identity(4)), 1e-15);
}

TEST(PatternSearch, FindsSmoothMaximum) {
    FidelitySearchOptions o;
    auto f = [](std::span<const double> x) { return -std::pow(x[0] - 1.25, 2) - std::pow(x[1] + 0.5, 2); };
    const auto r = pattern_search(f, {0.0, 0.0}, o);
    EXPECT_NEAR(r.x[0], 1.25, 1e-6);
    EXPECT_NEAR(r.x[1], -0.5, 1e-6);
    EXPECT_GT(r.evaluations, 0);
}

TEST(PatternSearch, RestartSeedsAreDistinctAndReproducible) {
    auto a = restart_rng(42, 1);
    auto b = restart_rng(42, 1);
    auto c = restart_rng(42, 2);
    const auto va = a();
    EXPECT_EQ(va, b());
    EXPECT_NE(va, c());
    EXPECT_THROW(multi_restart([](std::span<const double>) { return 0.0; }, 1, quick(0)), Error);
}

TEST(LocalFidelity, ConditionalStates) {
    const auto& r = apparatus();
    const double expected[4] = {0.0, 0.5, 0.5, 0.0};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto res = max_bell_fidelity_local(r.conditionals[k], quick());
        EXPECT_NEAR(res.value, expected[k], 1e-8) << r.conditionals[k].outcome.label();
        EXPECT_LE(res.side_a.unitarity_defect(), 1e-12);
        EXPECT_LE(res.side_d.unitarity_defect(), 1e-12);
    }
}

TEST(LocalFidelity, ReachesOneForRotatedSinglet) {
    std::mt19937_64 rng(9);
    const PureState s = apply_passive(
        bell(BellKind::psi_minus).state,
        local_unitary(testutil::random_unitary(2, rng), testutil::random_unitary(2, rng)));
    EXPECT_NEAR(max_bell_fidelity_local(s, quick()).value, 1.0, 1e-8);
}

TEST(GlobalFidelity, BoundedAwayFromOne) {
    const auto& r = apparatus();
    for (const auto& c : r.conditionals) {
        const auto res = max_bell_fidelity_global(c, quick());
        EXPECT_LT(res.value, 0.99);
        EXPECT_NEAR(res.value, takagi_fidelity_bound(c.state, bell(res.best_bell).state), 1e-6);
        EXPECT_LE(res.unitary.matrix.unitarity_defect(), 1e-12);
        EXPECT_NEAR(fidelity(apply_passive(c.state, res.unitary), bell(res.best_bell)), res.value, 1e-12);
    }
}

TEST(GlobalFidelity, ValueDominatesEveryRestart) {
    const auto res = max_bell_fidelity_global(apparatus().conditionals[1], quick());
    ASSERT_EQ(res.restart_values.size(), 8u);
    for (double v : res.restart_values) {
        EXPECT_LE(v, res.value);
    }
    EXPECT_LE(res.value, 1.0 + 1e-12);
}

TEST(GlobalFidelity, DeterministicWithAndWithoutThreads) {
    FidelitySearchOptions threaded = quick(6);
    FidelitySearchOptions serial = threaded;
    serial.parallel = false;
    const auto& c = apparatus().conditionals[2];
    const auto a = max_bell_fidelity_global(c, threaded);
    const auto b = max_bell_fidelity_global(c, serial);
    const auto again = max_bell_fidelity_global(c, threaded);
    EXPECT_EQ(a.restart_values, b.restart_values);
    EXPECT_EQ(a.restart_values, again.restart_values);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(GlobalFidelity, SeedChangesStartsButNotMaximum) {
    FidelitySearchOptions o = quick(6);
    o.seed = 7;
    const auto& c = apparatus().conditionals[0];
    const auto a = max_bell_fidelity_global(c, o);
    const auto b = max_bell_fidelity_global(c, quick(6));
    EXPECT_NE(a.restart_values, b.restart_values);
    EXPECT_NEAR(a.value, b.value, 1e-6);
}

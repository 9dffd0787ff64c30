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

#include "swapsim/entangle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "swapsim/detect.hpp"
#include "swapsim/jacobi.hpp"
#include "swapsim/oracle.hpp"
#include "swapsim/pipeline.hpp"
#include "test_util.hpp"

using namespace swapsim;
using namespace swapsim::modes;

namespace {

constexpr double kTol = 1e-12;

std::vector<OccupationVector> one_one_basis() {
    std::vector<OccupationVector> basis;
    for (auto pa : {Polarization::x, Polarization::y}) {
        for (auto pd : {Polarization::x, Polarization::y}) {
            basis.push_back(one_one(pa, pd));
        }
    }
    std::sort(basis.begin(), basis.end());
    return basis;
}

DensityMatrix projector(BellKind kind) { return DensityMatrix::from_pure(bell(kind).state, one_one_basis()); }

DensityMatrix noisy(BellKind kind, double xi) {
    const DensityMatrix p = projector(kind);
    return DensityMatrix(p.basis(), p.entries() + Complex{xi / 4.0} * Matrix::identity(4)).normalized();
}

PipelineResult apparatus(double xi = 0.1) {
    PipelineOptions o;
    o.pdc.xi = xi;
    o.pdc.order = 2;
    return run_pipeline(o);
}

}  // namespace

TEST(Bell, OrthonormalAndSingletSigns) {
    const auto& all = all_bell_states();
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_NEAR(std::abs(inner(all[i].state, all[j].state)), i == j ? 1.0 : 0.0, kTol);
        }
    }
    const PureState s = bell(BellKind::psi_minus).state;
    EXPECT_NEAR(s.amplitude(one_one(Polarization::x, Polarization::y)).real(), 1.0 / std::numbers::sqrt2, kTol);
    EXPECT_NEAR(s.amplitude(one_one(Polarization::y, Polarization::x)).real(), -1.0 / std::numbers::sqrt2, kTol);
    EXPECT_EQ(bell_name(BellKind::psi_minus), "Psi-");
}

TEST(PartialTranspose, SingletOnFullProductSpace) {
    const DensityMatrix pt = partial_transpose(projector(BellKind::psi_minus));
    EXPECT_EQ(pt.dim(), 36u);
    const auto eig = eig_hermitian(pt.entries());
    EXPECT_NEAR(eig.front(), -0.5, kTol);
    EXPECT_NEAR(negativity(projector(BellKind::psi_minus)), 0.5, kTol);
}

TEST(PartialTranspose, ProductStateStaysPositive) {
    PureState::Terms t;
    t.emplace(one_one(Polarization::x, Polarization::y), 1.0);
    const DensityMatrix rho = DensityMatrix::from_pure(PureState(std::move(t)), one_one_basis());
    EXPECT_NEAR(negativity(rho), 0.0, kTol);
}

TEST(PartialTranspose, InvolutionPreservesTraceAndHermiticity) {
    std::mt19937_64 rng(3);
    const auto basis = product_basis(2);
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho(basis, testutil::random_hermitian(basis.size(), rng));
        const DensityMatrix once = partial_transpose(rho);
        const DensityMatrix twice = partial_transpose(once);
        EXPECT_LE(max_abs_diff(twice.entries(), embed_product(rho).entries()), kTol);
        EXPECT_NEAR(std::abs(once.trace() - rho.trace()), 0.0, 1e-10);
        EXPECT_LE(once.entries().hermiticity_defect(), kTol);
    }
}

TEST(PartialTranspose, ApparatusMixtureIsEntangled) {
    const PipelineResult r = apparatus();
    const auto spec = pt_spectrum(r.rho);
    EXPECT_NEAR(spec.front(), -std::sqrt(3.0) / 8.0, kTol);
    EXPECT_NEAR(negativity(r.rho), (1.0 + std::sqrt(3.0)) / 8.0, kTol);
    double sum = 0.0;
    for (double v : spec) {
        sum += v;
    }
    EXPECT_NEAR(sum, 1.0, kTol);
}

TEST(PartialTranspose, IndependentOfXi) {
    for (double xi : {0.02, 0.1, 0.3}) {
        EXPECT_NEAR(negativity(apparatus(xi).rho), (1.0 + std::sqrt(3.0)) / 8.0, kTol);
    }
}

TEST(Jacobi, DiagonalAndIdentity) {
    Matrix d(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d(2, 2) = 2.0;
    EXPECT_EQ(eig_hermitian(d), (std::vector<double>{-1.0, 2.0, 3.0}));
    for (double v : eig_hermitian(Matrix::identity(5))) {
        EXPECT_NEAR(v, 1.0, kTol);
    }
}

TEST(Jacobi, RejectsNonHermitian) {
    Matrix m(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(eig_hermitian(m), Error);
}

TEST(Jacobi, AgreesWithPowerIterationOnRandomMatrices) {
    std::mt19937_64 rng(20);
    std::uniform_int_distribution<std::size_t> dim(2, 36);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix h = testutil::random_hermitian(dim(rng), rng);
        const auto jac = eig_hermitian(h);
        auto pow = oracle::eig_power_deflation(h);
        std::sort(pow.begin(), pow.end());
        ASSERT_EQ(jac.size(), pow.size());
        double scale = 1.0;
        for (double v : jac) {
            scale = std::max(scale, std::abs(v));
        }
        for (std::size_t i = 0; i < jac.size(); ++i) {
            EXPECT_NEAR(jac[i], pow[i], 1e-9 * scale) << "trial " << trial << " index " << i;
        }
    }
}

TEST(Fidelity, MixtureHasQuarterSingletOverlap) {
    const PipelineResult r = apparatus();
    EXPECT_NEAR(fidelity(r.rho, bell(BellKind::psi_minus)), 0.25, kTol);
    for (BellKind k : {BellKind::psi_plus, BellKind::phi_plus, BellKind::phi_minus}) {
        EXPECT_NEAR(fidelity(r.rho, bell(k)), 0.0, kTol);
    }
    const BellScore best = best_bell_fidelity(r.rho);
    EXPECT_EQ(best.kind, BellKind::psi_minus);
    EXPECT_NEAR(best.fidelity, 0.25, kTol);
}

TEST(Fidelity, ConditionalStatesAgainstSinglet) {
    const PipelineResult r = apparatus();
    EXPECT_NEAR(fidelity(r.conditionals[0].state, bell(BellKind::psi_minus)), 0.0, kTol);
    EXPECT_NEAR(fidelity(r.conditionals[1].state, bell(BellKind::psi_minus)), 0.5, kTol);
    EXPECT_NEAR(fidelity(r.conditionals[2].state, bell(BellKind::psi_minus)), 0.5, kTol);
    EXPECT_NEAR(fidelity(r.conditionals[3].state, bell(BellKind::psi_minus)), 0.0, kTol);
}

TEST(Fidelity, BellOverlapsOfAnyStateSumToAtMostOne) {
    std::mt19937_64 rng(5);
    const auto support = testutil::modes_of({Spatial::a, Spatial::d});
    for (int trial = 0; trial < 50; ++trial) {
        const PureState s = testutil::random_state(rng, support, 2, 8);
        if (s.norm_squared() < 1e-9) {
            continue;
        }
        double total = 0.0;
        for (const auto& b : all_bell_states()) {
            total += fidelity(s, b);
        }
        EXPECT_LE(total, 1.0 + kTol);
    }
}

TEST(Fidelity, SingletInvariantUnderEqualLocalUnitaries) {
    std::mt19937_64 rng(50);
    const PureState singlet = bell(BellKind::psi_minus).state;
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix u = testutil::random_unitary(2, rng);
        const PureState out = apply_passive(singlet, PassiveUnitary{{a_x, a_y, d_x, d_y}, [&] {
                                                Matrix m(4, 4);
                                                for (std::size_t i = 0; i < 2; ++i) {
                                                    for (std::size_t j = 0; j < 2; ++j) {
                                                        m(i, j) = u(i, j);
                                                        m(i + 2, j + 2) = u(i, j);
                                                    }
                                                }
                                                return m;
                                            }()});
        EXPECT_NEAR(fidelity(out, bell(BellKind::psi_minus)), 1.0, 1e-10);
    }
}

TEST(EventReady, ApparatusIsNotEventReady) {
    const std::vector<double> grid{0.2, 0.1, 0.05};
    const auto v = event_ready_check(grid, [](double xi) { return apparatus(xi).rho; });
    EXPECT_FALSE(v.is_event_ready);
    EXPECT_NEAR(v.score, 0.25, kTol);
    EXPECT_NEAR(v.fit_intercept, 0.75, 1e-10);
    EXPECT_NEAR(v.fit_slope, 0.0, 1e-10);
    EXPECT_EQ(v.xi_series.size(), 3u);
}

TEST(EventReady, NoisySingletIsEventReady) {
    const std::vector<double> grid{0.2, 0.1, 0.05};
    for (BellKind kind : kAllBellKinds) {
        const auto v = event_ready_check(grid, [kind](double xi) { return noisy(kind, xi); });
        EXPECT_TRUE(v.is_event_ready) << bell_name(kind);
        EXPECT_EQ(v.best_bell, kind);
        EXPECT_GT(v.fit_slope, 0.0);
        EXPECT_LT(v.fit_intercept, 0.05);
    }
}

TEST(EventReady, ScoreFloorRejectsPoorStateWithVanishingIntercept) {
    // Heavy noise on a coarse grid: the smallest xi already scores below 0.9.
    const std::vector<double> grid{0.5, 0.4, 0.3};
    const auto v = event_ready_check(grid, [](double xi) { return noisy(BellKind::psi_minus, 4.0 * xi); });
    EXPECT_LT(v.score, 0.9);
    EXPECT_FALSE(v.is_event_ready);
}

TEST(EventReady, GridValidation) {
    const std::vector<double> two{0.1, 0.2};
    const std::vector<double> dup{0.1, 0.1, 0.2};
    const std::vector<double> neg{-0.1, 0.1, 0.2};
    auto f = [](double xi) { return noisy(BellKind::psi_minus, xi); };
    EXPECT_THROW(event_ready_check(two, f), Error);
    EXPECT_THROW(event_ready_check(dup, f), Error);
    EXPECT_THROW(event_ready_check(neg, f), Error);
}

TEST(Takagi, ConditionalAndBellSpectra) {
    const PipelineResult r = apparatus();
    const double h = 1.0 / std::numbers::sqrt2;
    for (const auto& c : r.conditionals) {
        const auto s = takagi_spectrum(c.state);
        EXPECT_NEAR(s[0], h, kTol);
        EXPECT_NEAR(s[1], h, kTol);
        EXPECT_NEAR(s[2], 0.0, kTol);
        EXPECT_NEAR(s[3], 0.0, kTol);
        for (const auto& b : all_bell_states()) {
            EXPECT_NEAR(takagi_fidelity_bound(c.state, b.state), 0.5, kTol);
        }
    }
    for (const auto& b : all_bell_states()) {
        for (double v : takagi_spectrum(b.state)) {
            EXPECT_NEAR(v, 0.5, kTol);
        }
    }
}

TEST(Takagi, InvariantUnderPassiveOptics) {
    std::mt19937_64 rng(4);
    const PipelineResult r = apparatus();
    for (int trial = 0; trial < 30; ++trial) {
        const PassiveUnitary u{{kTakagiModes.begin(), kTakagiModes.end()}, testutil::random_unitary(4, rng)};
        for (const auto& c : r.conditionals) {
            const auto before = takagi_spectrum(c.state);
            const auto after = takagi_spectrum(apply_passive(c.state, u));
            // Zero singular values come out of a square root, so compare squares.
            for (std::size_t i = 0; i < 4; ++i) {
                EXPECT_NEAR(before[i] * before[i], after[i] * after[i], 1e-12);
            }
        }
    }
}

TEST(Takagi, BoundHoldsForRandomUnitaries) {
    std::mt19937_64 rng(8);
    const PipelineResult r = apparatus();
    for (int trial = 0; trial < 100; ++trial) {
        const PassiveUnitary u{{kTakagiModes.begin(), kTakagiModes.end()}, testutil::random_unitary(4, rng)};
        for (const auto& c : r.conditionals) {
            EXPECT_LE(best_bell_fidelity(apply_passive(c.state, u)).fidelity, 0.5 + 1e-10);
        }
    }
}

TEST(Takagi, RejectsOtherSectors) {
    PureState::Terms t;
    t.emplace(OccupationVector{{a_x, 1}}, 1.0);
    EXPECT_THROW(takagi_spectrum(PureState(std::move(t))), Error);
    PureState::Terms u;
    u.emplace(OccupationVector{{a_x, 1}, {b_x, 1}}, 1.0);
    EXPECT_THROW(takagi_spectrum(PureState(std::move(u))), Error);
}

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

#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "swapsim/density.hpp"
#include "swapsim/fock.hpp"

namespace swapsim {

/// Polarizations registered at D_u and D_v in a two-fold coincidence.
struct DetectionOutcome {
    Polarization at_u = Polarization::x;
    Polarization at_v = Polarization::x;

    std::string label() const {
        return std::string{'(', polarization_name(at_u), ',', polarization_name(at_v), ')'};
    }
    auto operator<=>(const DetectionOutcome&) const = default;
};

/// (x,x), (x,y), (y,x), (y,y).
inline constexpr std::array<DetectionOutcome, 4> kAllOutcomes{
    DetectionOutcome{Polarization::x, Polarization::x}, DetectionOutcome{Polarization::x, Polarization::y},
    DetectionOutcome{Polarization::y, Polarization::x}, DetectionOutcome{Polarization::y, Polarization::y}};

/// Unnormalized post-selected state on modes a, d.
struct ConditionalState {
    DetectionOutcome outcome;
    PureState state;
    /// ||state||^2.
    double weight = 0.0;
};

struct ProjectionOptions {
    /// Keep every power of xi instead of only the lowest nonvanishing one.
    bool retain_all_orders = false;
};

/// Detector basis vector: one photon in u (outcome.at_u), one in v
/// (outcome.at_v), nothing else on the detector modes.
inline OccupationVector detector_occupation(const DetectionOutcome& outcome) {
    OccupationVector occ;
    occ.set({Spatial::u, outcome.at_u}, 1);
    occ.set({Spatial::v, outcome.at_v}, 1);
    return occ;
}

/// Partial inner product of `state` with the detector basis vector for
/// `outcome`, restricted to modes a and d.
inline ConditionalState project_outcome(const PureState& state, const DetectionOutcome& outcome,
                                        const ProjectionOptions& options = {}) {
    const ModeSet detectors = ModeSet::of_spatial({Spatial::u, Spatial::v});
    const ModeSet ad = ModeSet::of_spatial({Spatial::a, Spatial::d});
    const OccupationVector want = detector_occupation(outcome);

    PureState::Terms projected;
    for (const auto& [occ, amp] : state.terms()) {
        bool match = true;
        OccupationVector rest = occ;
        for (std::size_t i = 0; i < kNumModes; ++i) {
            if (detectors.contains_index(i)) {
                match = match && occ.at_index(i) == want.at_index(i);
                rest.set_index(i, 0);
            }
        }
        if (match) {
            projected.emplace(rest, amp);
        }
    }
    PureState conditional = restrict(PureState(std::move(projected), state.cutoff(), state.truncated()), ad);

    if (!options.retain_all_orders && !conditional.empty()) {
        // Every pair carries one power of xi and two photons, so the lowest
        // photon number is the lowest xi order.
        int lowest = conditional.max_photons();
        for (const auto& [occ, amp] : conditional.terms()) {
            lowest = std::min(lowest, occ.total());
        }
        PureState::Terms leading;
        for (const auto& [occ, amp] : conditional.terms()) {
            if (occ.total() == lowest) {
                leading.emplace(occ, amp);
            }
        }
        conditional = PureState(std::move(leading), conditional.cutoff(), conditional.truncated());
    }
    if (conditional.empty()) {
        throw Error("no coincidence support for outcome " + outcome.label());
    }
    const double weight = conditional.norm_squared();
    return {outcome, std::move(conditional), weight};
}

inline std::array<ConditionalState, 4> all_conditionals(const PureState& state,
                                                        const ProjectionOptions& options = {}) {
    return {project_outcome(state, kAllOutcomes[0], options), project_outcome(state, kAllOutcomes[1], options),
            project_outcome(state, kAllOutcomes[2], options), project_outcome(state, kAllOutcomes[3], options)};
}

/// All a,d occupation vectors with exactly `photons` photons, in canonical order.
inline std::vector<OccupationVector> ad_sector(int photons) {
    std::vector<OccupationVector> out;
    for (auto a : side_basis(photons)) {
        if (a.total() > photons) {
            continue;
        }
        for (auto d : side_basis(photons - a.total())) {
            if (a.total() + d.total() == photons) {
                out.push_back(compose_sides(a, d));
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Trace-normalized sum of |phi><phi| over the conditional states. Each
/// outcome enters with its physical weight; nothing is imposed.
template <typename Range>
DensityMatrix mixture(const Range& conds) {
    std::set<int> sectors;
    double total_weight = 0.0;
    for (const ConditionalState& c : conds) {
        total_weight += c.weight;
        for (const auto& [occ, amp] : c.state.terms()) {
            sectors.insert(occ.total());
        }
    }
    if (!(total_weight > 0.0)) {
        throw Error("mixture: all conditional weights are zero");
    }
    std::vector<OccupationVector> basis;
    for (int n : sectors) {
        auto sector = ad_sector(n);
        basis.insert(basis.end(), sector.begin(), sector.end());
    }
    std::sort(basis.begin(), basis.end());
    DensityMatrix rho(basis, Matrix(basis.size(), basis.size()));
    for (const ConditionalState& c : conds) {
        rho.add_projector(c.state);
    }
    return rho.normalized();
}

}  // namespace swapsim

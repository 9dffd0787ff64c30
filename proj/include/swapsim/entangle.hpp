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

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "swapsim/density.hpp"
#include "swapsim/fock.hpp"
#include "swapsim/jacobi.hpp"

namespace swapsim {

enum class BellKind { psi_plus, psi_minus, phi_plus, phi_minus };

inline constexpr std::array<BellKind, 4> kAllBellKinds{BellKind::psi_plus, BellKind::psi_minus, BellKind::phi_plus,
                                                      BellKind::phi_minus};

inline std::string bell_name(BellKind kind) {
    switch (kind) {
        case BellKind::psi_plus: return "Psi+";
        case BellKind::psi_minus: return "Psi-";
        case BellKind::phi_plus: return "Phi+";
        case BellKind::phi_minus: return "Phi-";
    }
    return "?";
}

struct BellState {
    BellKind kind;
    PureState state;
};

/// |p,q> = one photon of polarization p in a, one of polarization q in d.
inline OccupationVector one_one(Polarization pa, Polarization pd) {
    OccupationVector occ;
    occ.set({Spatial::a, pa}, 1);
    occ.set({Spatial::d, pd}, 1);
    return occ;
}

/// Psi(+-) = (|x,y> +- |y,x>)/sqrt2, Phi(+-) = (|x,x> +- |y,y>)/sqrt2.
inline BellState bell(BellKind kind) {
    using enum Polarization;
    const double r = 1.0 / std::numbers::sqrt2;
    const bool psi = kind == BellKind::psi_plus || kind == BellKind::psi_minus;
    const double sign = (kind == BellKind::psi_plus || kind == BellKind::phi_plus) ? 1.0 : -1.0;
    PureState::Terms terms;
    if (psi) {
        terms.emplace(one_one(x, y), r);
        terms.emplace(one_one(y, x), sign * r);
    } else {
        terms.emplace(one_one(x, x), r);
        terms.emplace(one_one(y, y), sign * r);
    }
    return {kind, PureState(std::move(terms))};
}

/// Transposes the side-d indices on the a|d product space:
///   ((A, D), (A', D')) -> ((A, D'), (A', D)).
inline DensityMatrix partial_transpose(const DensityMatrix& rho) {
    const DensityMatrix e = embed_product(rho);
    int max_side = 0;
    for (const auto& occ : e.basis()) {
        max_side = std::max(max_side, side_a(occ).total());
    }
    const std::size_t s = side_basis(max_side).size();
    Matrix out(e.dim(), e.dim());
    for (std::size_t ia = 0; ia < s; ++ia) {
        for (std::size_t id = 0; id < s; ++id) {
            for (std::size_t ja = 0; ja < s; ++ja) {
                for (std::size_t jd = 0; jd < s; ++jd) {
                    out(ia * s + id, ja * s + jd) = e(ia * s + jd, ja * s + id);
                }
            }
        }
    }
    return DensityMatrix(e.basis(), std::move(out));
}

inline std::vector<double> pt_spectrum(const DensityMatrix& rho) {
    return eig_hermitian(partial_transpose(rho).entries());
}

/// Sum of |negative eigenvalues| of the partial transpose.
inline double negativity(const DensityMatrix& rho) {
    double n = 0.0;
    for (double lambda : pt_spectrum(rho)) {
        n += std::max(0.0, -lambda);
    }
    return n;
}

inline double fidelity(const DensityMatrix& rho, const BellState& target) {
    return rho.expectation(target.state).real() / rho.trace();
}

/// |<target|psi>|^2 / <psi|psi>.
inline double fidelity(const PureState& psi, const BellState& target) {
    return std::norm(inner(target.state, psi)) / psi.norm_squared();
}

struct BellScore {
    BellKind kind = BellKind::psi_minus;
    double fidelity = 0.0;
};

/// The four Bell states in kAllBellKinds order, built once.
inline const std::array<BellState, 4>& all_bell_states() {
    static const std::array<BellState, 4> states{bell(kAllBellKinds[0]), bell(kAllBellKinds[1]),
                                                 bell(kAllBellKinds[2]), bell(kAllBellKinds[3])};
    return states;
}

template <typename Source>
BellScore best_bell_fidelity(const Source& source) {
    BellScore best{BellKind::psi_plus, -1.0};
    for (const BellState& b : all_bell_states()) {
        const BellKind kind = b.kind;
        const double f = fidelity(source, b);
        if (f > best.fidelity) {
            best = {kind, f};
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Event-ready decision

struct EventReadyRule {
    /// Minimum Bell fidelity at the smallest grid value.
    double min_score = 0.9;
    /// Largest admissible intercept of the linear fit 1 - score ~ c0 + C xi;
    /// the infidelity has to vanish with xi.
    double max_intercept = 0.05;
};

struct XiScore {
    double xi = 0.0;
    double score = 0.0;
};

struct EventReadyVerdict {
    BellKind best_bell = BellKind::psi_minus;
    /// Best Bell fidelity at the smallest xi on the grid.
    double score = 0.0;
    std::vector<XiScore> xi_series;
    double fit_slope = 0.0;
    double fit_intercept = 0.0;
    double fit_r2 = 0.0;
    bool is_event_ready = false;
};

/// Scores rho(xi) against all four Bell states over `grid` and decides
/// whether 1 - score = O(xi).
inline EventReadyVerdict event_ready_check(std::span<const double> grid,
                                           const std::function<DensityMatrix(double)>& rho_at,
                                           const EventReadyRule& rule = {}) {
    std::vector<double> xs(grid.begin(), grid.end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (xs.size() < 3 || xs.front() <= 0.0) {
        throw Error("event_ready_check: need at least three distinct positive xi values");
    }

    EventReadyVerdict verdict;
    for (double xi : grid) {
        verdict.xi_series.push_back({xi, best_bell_fidelity(rho_at(xi)).fidelity});
    }
    const BellScore at_smallest = best_bell_fidelity(rho_at(xs.front()));
    verdict.best_bell = at_smallest.kind;
    verdict.score = at_smallest.fidelity;

    // Ordinary least squares of d = 1 - score against xi.
    const double n = static_cast<double>(verdict.xi_series.size());
    double sx = 0.0, sd = 0.0, sxx = 0.0, sxd = 0.0;
    for (auto [xi, score] : verdict.xi_series) {
        const double d = 1.0 - score;
        sx += xi;
        sd += d;
        sxx += xi * xi;
        sxd += xi * d;
    }
    const double denom = n * sxx - sx * sx;
    verdict.fit_slope = (n * sxd - sx * sd) / denom;
    verdict.fit_intercept = (sd - verdict.fit_slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    for (auto [xi, score] : verdict.xi_series) {
        const double d = 1.0 - score;
        ss_res += std::pow(d - (verdict.fit_intercept + verdict.fit_slope * xi), 2);
        ss_tot += std::pow(d - sd / n, 2);
    }
    // A constant series has no xi dependence at all; report zero quality.
    verdict.fit_r2 = ss_tot > 1e-24 ? 1.0 - ss_res / ss_tot : 0.0;

    verdict.is_event_ready = std::isfinite(verdict.fit_slope) && verdict.fit_slope >= 0.0 &&
                             verdict.fit_intercept <= rule.max_intercept && verdict.score >= rule.min_score;
    return verdict;
}

// ---------------------------------------------------------------------------
// Takagi invariants of two-photon states on (a_x, a_y, d_x, d_y)

inline constexpr std::array<ModeId, 4> kTakagiModes{modes::a_x, modes::a_y, modes::d_x, modes::d_y};

/// Symmetric M with psi = sum_ij M_ij f_i^dag f_j^dag |0>.
inline Matrix takagi_matrix(const PureState& psi) {
    Matrix m(4, 4);
    for (const auto& [occ, amp] : psi.terms()) {
        if (occ.total() != 2) {
            throw Error("takagi_spectrum: support is not exactly two-photon");
        }
        std::vector<std::size_t> occupied;
        int on_takagi_modes = 0;
        for (std::size_t k = 0; k < kTakagiModes.size(); ++k) {
            const int nk = occ[kTakagiModes[k]];
            on_takagi_modes += nk;
            for (int r = 0; r < nk; ++r) {
                occupied.push_back(k);
            }
        }
        if (on_takagi_modes != 2) {
            throw Error("takagi_spectrum: photons outside modes a and d");
        }
        const auto i = occupied[0];
        const auto j = occupied[1];
        if (i == j) {
            // (f^dag)^2 |0> = sqrt2 |2>
            m(i, i) += amp / std::numbers::sqrt2;
        } else {
            m(i, j) += amp / 2.0;
            m(j, i) += amp / 2.0;
        }
    }
    return m;
}

/// Singular values of the Takagi matrix, descending, scaled to unit sum of
/// squares. Passive optics acts as M -> U M U^T and leaves them unchanged.
inline std::array<double, 4> takagi_spectrum(const PureState& psi) {
    const Matrix m = takagi_matrix(psi);
    const auto eig = eig_hermitian(m.adjoint() * m);
    std::array<double, 4> s{};
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        s[i] = std::sqrt(std::max(0.0, eig[3 - i]));
        total += s[i] * s[i];
    }
    if (!(total > 0.0)) {
        throw Error("zero-norm state");
    }
    for (auto& v : s) {
        v /= std::sqrt(total);
    }
    return s;
}

/// Exact maximum of |<target|U psi>|^2 / <psi|psi> over all 4x4 passive U:
/// (sum_i s_i(target) s_i(psi))^2 with both spectra unit-normalized.
inline double takagi_fidelity_bound(const PureState& psi, const PureState& target) {
    const auto sp = takagi_spectrum(psi);
    const auto st = takagi_spectrum(target);
    double overlap = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        overlap += sp[i] * st[i];
    }
    return overlap * overlap;
}

}  // namespace swapsim

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
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "swapsim/fock.hpp"
#include "swapsim/matrix.hpp"

namespace swapsim {

/// One down-converter, emitting pairs into (signal, idler).
struct PdcSource {
    Spatial signal = Spatial::a;
    Spatial idler = Spatial::b;
};

struct PdcConfig {
    double xi = 0.1;
    /// Pair-emission power retained per source.
    int order = 2;
    std::array<PdcSource, 2> wiring{PdcSource{Spatial::a, Spatial::b}, PdcSource{Spatial::c, Spatial::d}};
    /// Pump phase of the second source relative to the first, in radians.
    double relative_pump_phase = 0.0;

    int cutoff() const { return 2 * order; }

    void validate() const {
        if (!(xi > 0.0 && xi < 1.0)) {
            throw Error("PdcConfig: xi must lie in (0, 1)");
        }
        if (order < 1) {
            throw Error("PdcConfig: order must be >= 1");
        }
        const std::array paths{wiring[0].signal, wiring[0].idler, wiring[1].signal, wiring[1].idler};
        for (std::size_t i = 0; i < paths.size(); ++i) {
            for (std::size_t j = i + 1; j < paths.size(); ++j) {
                if (paths[i] == paths[j]) {
                    throw Error("PdcConfig: wiring must name four distinct spatial modes");
                }
            }
        }
    }
};

/// Applies the pair creator s_x^dag i_y^dag - s_y^dag i_x^dag.
inline PureState apply_pair_creator(const PureState& state, const PdcSource& source) {
    const ModeId sx{source.signal, Polarization::x};
    const ModeId sy{source.signal, Polarization::y};
    const ModeId ix{source.idler, Polarization::x};
    const ModeId iy{source.idler, Polarization::y};
    const PureState plus = apply_create(apply_create(state, sx), iy);
    const PureState minus = apply_create(apply_create(state, sy), ix);
    return add_scaled(plus, minus, -1.0);
}

/// Two down-converters expanded to `order` pairs each:
///   prod_s sum_{n<=order} (xi_s^n / n!) (K_s^dag)^n |0>
/// Unnormalized; the vacuum amplitude is exactly 1. Terms above the photon
/// cutoff 2 * order are dropped and flagged.
inline PureState pdc_state(const PdcConfig& cfg) {
    cfg.validate();
    PureState state = vacuum(cfg.cutoff());
    for (std::size_t s = 0; s < cfg.wiring.size(); ++s) {
        const Complex amplitude =
            s == 0 ? Complex{cfg.xi, 0.0} : std::polar(cfg.xi, cfg.relative_pump_phase);
        PureState power = state;  // (K^dag)^n applied to the state so far
        PureState acc = state;
        Complex coeff = 1.0;
        for (int n = 1; n <= cfg.order; ++n) {
            power = apply_pair_creator(power, cfg.wiring[s]);
            coeff *= amplitude / static_cast<double>(n);
            acc = add_scaled(acc, power, coeff);
        }
        state = acc;
    }
    return state;
}

/// Linear substitution of creation operators: every mode `m` in `images`
/// is replaced by sum_k coeff_k * target_k^dag. Modes not listed are left
/// alone. Used for both the beam splitter and general passive optics.
using ModeImages = std::map<ModeId, std::vector<std::pair<ModeId, Complex>>>;

inline PureState substitute(const PureState& state, const ModeImages& images,
                            double prune_tolerance = kPruneTolerance) {
    ModeSet sources;
    ModeSet targets;
    for (const auto& [src, image] : images) {
        sources.insert(src);
        for (const auto& [dst, c] : image) {
            targets.insert(dst);
        }
    }

    // Work in the monomial picture: amplitude / sqrt(prod n!) is the
    // coefficient of prod (f^dag)^n |0>, which multiplies out linearly.
    std::map<OccupationVector, Complex> out;
    for (const auto& [occ, amp] : state.terms()) {
        OccupationVector base = occ;
        double source_factorials = 1.0;
        for (std::size_t i = 0; i < kNumModes; ++i) {
            const ModeId m = ModeId::from_index(i);
            if (sources.contains(m)) {
                for (int k = 2; k <= occ[m]; ++k) {
                    source_factorials *= k;
                }
                base.set(m, 0);
            } else if (targets.contains(m) && occ[m] > 0) {
                throw Error("substitute: output mode " + m.name() + " is already occupied");
            }
        }

        std::map<OccupationVector, Complex> poly{{base, amp / std::sqrt(source_factorials)}};
        for (const auto& [src, image] : images) {
            for (int photon = 0; photon < occ[src]; ++photon) {
                std::map<OccupationVector, Complex> next;
                for (const auto& [mono, c] : poly) {
                    for (const auto& [dst, w] : image) {
                        OccupationVector grown = mono;
                        grown.set(dst, mono[dst] + 1);
                        next[grown] += c * w;
                    }
                }
                poly = std::move(next);
            }
        }
        for (const auto& [mono, c] : poly) {
            double target_factorials = 1.0;
            for (std::size_t i = 0; i < kNumModes; ++i) {
                if (targets.contains_index(i)) {
                    for (int k = 2; k <= mono.at_index(i); ++k) {
                        target_factorials *= k;
                    }
                }
            }
            out[mono] += c * std::sqrt(target_factorials);
        }
    }
    std::erase_if(out, [&](const auto& kv) { return std::abs(kv.second) < prune_tolerance; });
    return PureState(std::move(out), state.cutoff(), state.truncated());
}

/// Port assignment of a two-input two-output beam splitter.
struct BeamSplitterPorts {
    Spatial in1 = Spatial::b;
    Spatial in2 = Spatial::c;
    Spatial out1 = Spatial::u;
    Spatial out2 = Spatial::v;
};

/// Per-polarization 2x2 transfer matrix: column j is the image of input j
/// over (out1, out2).
using BeamSplitterMatrices = std::array<Matrix, 2>;

/// in1 -> (out1 + out2)/sqrt2, in2 -> (out1 - out2)/sqrt2 for both polarizations.
inline BeamSplitterMatrices symmetric_beam_splitter() {
    const double r = 1.0 / std::numbers::sqrt2;
    const Matrix m{{r, r}, {r, -r}};
    return {m, m};
}

inline PureState beam_splitter(const PureState& state, const BeamSplitterPorts& ports,
                               const BeamSplitterMatrices& transfer = symmetric_beam_splitter()) {
    const std::array paths{ports.in1, ports.in2, ports.out1, ports.out2};
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t j = i + 1; j < paths.size(); ++j) {
            if (paths[i] == paths[j]) {
                throw Error("beam_splitter: ports must be four distinct spatial modes");
            }
        }
    }
    ModeImages images;
    for (auto pol : {Polarization::x, Polarization::y}) {
        const Matrix& t = transfer[static_cast<std::size_t>(pol)];
        if (t.rows() != 2 || t.cols() != 2 || t.unitarity_defect() > kCompareTolerance) {
            throw Error("beam_splitter: transfer matrix is not a 2x2 unitary");
        }
        const ModeId o1{ports.out1, pol};
        const ModeId o2{ports.out2, pol};
        images[ModeId{ports.in1, pol}] = {{o1, t(0, 0)}, {o2, t(1, 0)}};
        images[ModeId{ports.in2, pol}] = {{o1, t(0, 1)}, {o2, t(1, 1)}};
    }
    return substitute(state, images);
}

/// Unitary acting on an ordered list of modes: mode_list[j]^dag maps to
/// sum_i matrix(i, j) * mode_list[i]^dag. Applying U then V equals V*U.
struct PassiveUnitary {
    std::vector<ModeId> mode_list;
    Matrix matrix;

    static PassiveUnitary identity(std::vector<ModeId> modes) {
        const auto n = modes.size();
        return {std::move(modes), Matrix::identity(n)};
    }
};

inline PureState apply_passive(const PureState& state, const PassiveUnitary& u,
                               double tolerance = kCompareTolerance) {
    const std::size_t n = u.mode_list.size();
    if (u.matrix.rows() != n || u.matrix.cols() != n) {
        throw Error("apply_passive: matrix size does not match mode list");
    }
    if (u.matrix.unitarity_defect() > tolerance) {
        throw Error("not unitary");
    }
    ModeImages images;
    for (std::size_t j = 0; j < n; ++j) {
        auto& image = images[u.mode_list[j]];
        if (!image.empty()) {
            throw Error("apply_passive: mode list has duplicates");
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (u.matrix(i, j) != Complex{}) {
                image.emplace_back(u.mode_list[i], u.matrix(i, j));
            }
        }
    }
    return substitute(state, images);
}

}  // namespace swapsim

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

// Multimode bosonic Fock states over the twelve modes of the swapping setup.
//
// Modes are (spatial path, polarization) pairs. Their total order, used for
// occupation-vector indexing and for every deterministic iteration in the
// library, is
//
//   a_x a_y b_x b_y c_x c_y d_x d_y u_x u_y v_x v_y
//
// i.e. index = 2 * spatial + polarization.

#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "swapsim/matrix.hpp"

namespace swapsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Spatial : std::uint8_t { a = 0, b, c, d, u, v };
enum class Polarization : std::uint8_t { x = 0, y };

inline constexpr std::size_t kNumSpatial = 6;
inline constexpr std::size_t kNumModes = 12;

inline constexpr double kPruneTolerance = 1e-14;
inline constexpr double kCompareTolerance = 1e-12;

constexpr char spatial_name(Spatial s) { return "abcduv"[static_cast<int>(s)]; }
constexpr char polarization_name(Polarization p) { return p == Polarization::x ? 'x' : 'y'; }
constexpr Polarization other(Polarization p) {
    return p == Polarization::x ? Polarization::y : Polarization::x;
}

struct ModeId {
    Spatial spatial = Spatial::a;
    Polarization pol = Polarization::x;

    constexpr std::size_t index() const {
        return 2 * static_cast<std::size_t>(spatial) + static_cast<std::size_t>(pol);
    }
    static constexpr ModeId from_index(std::size_t i) {
        return ModeId{static_cast<Spatial>(i / 2), static_cast<Polarization>(i % 2)};
    }
    std::string name() const { return {spatial_name(spatial), '_', polarization_name(pol)}; }

    constexpr auto operator<=>(const ModeId& other) const { return index() <=> other.index(); }
    constexpr bool operator==(const ModeId& other) const { return index() == other.index(); }
};

namespace modes {
inline constexpr ModeId a_x{Spatial::a, Polarization::x};
inline constexpr ModeId a_y{Spatial::a, Polarization::y};
inline constexpr ModeId b_x{Spatial::b, Polarization::x};
inline constexpr ModeId b_y{Spatial::b, Polarization::y};
inline constexpr ModeId c_x{Spatial::c, Polarization::x};
inline constexpr ModeId c_y{Spatial::c, Polarization::y};
inline constexpr ModeId d_x{Spatial::d, Polarization::x};
inline constexpr ModeId d_y{Spatial::d, Polarization::y};
inline constexpr ModeId u_x{Spatial::u, Polarization::x};
inline constexpr ModeId u_y{Spatial::u, Polarization::y};
inline constexpr ModeId v_x{Spatial::v, Polarization::x};
inline constexpr ModeId v_y{Spatial::v, Polarization::y};
}  // namespace modes

/// Set of modes, indexed by ModeId::index().
class ModeSet {
public:
    ModeSet() = default;
    ModeSet(std::initializer_list<ModeId> ids) {
        for (auto m : ids) {
            insert(m);
        }
    }
    static ModeSet of_spatial(std::initializer_list<Spatial> paths) {
        ModeSet s;
        for (auto p : paths) {
            s.insert({p, Polarization::x});
            s.insert({p, Polarization::y});
        }
        return s;
    }
    void insert(ModeId m) { bits_.set(m.index()); }
    bool contains(ModeId m) const { return bits_.test(m.index()); }
    bool contains_index(std::size_t i) const { return bits_.test(i); }

private:
    std::bitset<kNumModes> bits_;
};

/// Photon number per mode.
class OccupationVector {
public:
    using Count = std::uint8_t;

    OccupationVector() { counts_.fill(0); }
    OccupationVector(std::initializer_list<std::pair<ModeId, int>> entries) : OccupationVector() {
        for (auto [m, n] : entries) {
            set(m, n);
        }
    }

    int operator[](ModeId m) const { return counts_[m.index()]; }
    int at_index(std::size_t i) const { return counts_[i]; }
    void set(ModeId m, int n) { set_index(m.index(), n); }
    void set_index(std::size_t i, int n) {
        if (n < 0 || n > 255) {
            throw Error("OccupationVector: photon count out of range");
        }
        counts_[i] = static_cast<Count>(n);
    }

    int total() const {
        int t = 0;
        for (auto c : counts_) {
            t += c;
        }
        return t;
    }

    /// Photons outside `keep`.
    int outside(const ModeSet& keep) const {
        int t = 0;
        for (std::size_t i = 0; i < kNumModes; ++i) {
            if (!keep.contains_index(i)) {
                t += counts_[i];
            }
        }
        return t;
    }

    /// Product of n! over all modes.
    double factorial_product() const {
        double p = 1.0;
        for (auto c : counts_) {
            for (int k = 2; k <= c; ++k) {
                p *= k;
            }
        }
        return p;
    }

    /// Ket label listing occupied modes, e.g. "|a_x^2 d_y>"; "|vac>" when empty.
    std::string label() const {
        std::string out = "|";
        bool first = true;
        for (std::size_t i = 0; i < kNumModes; ++i) {
            if (counts_[i] == 0) {
                continue;
            }
            if (!first) {
                out += ' ';
            }
            first = false;
            out += ModeId::from_index(i).name();
            if (counts_[i] > 1) {
                out += '^' + std::to_string(counts_[i]);
            }
        }
        return out + (first ? "vac>" : ">");
    }

    auto operator<=>(const OccupationVector&) const = default;
    bool operator==(const OccupationVector&) const = default;

private:
    std::array<Count, kNumModes> counts_;
};

/// Sparse superposition of Fock basis states.
///
/// A state optionally carries a total-photon cutoff. Operations that would
/// exceed it drop the offending terms and set the truncation flag, which then
/// propagates through every derived state.
class PureState {
public:
    using Terms = std::map<OccupationVector, Complex>;

    PureState() = default;
    explicit PureState(Terms terms, std::optional<int> cutoff = std::nullopt, bool truncated = false)
        : terms_(std::move(terms)), cutoff_(cutoff), truncated_(truncated) {}

    static PureState basis(const OccupationVector& occ, Complex amplitude = 1.0) {
        return PureState(Terms{{occ, amplitude}});
    }

    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    std::optional<int> cutoff() const { return cutoff_; }
    bool truncated() const { return truncated_; }

    Complex amplitude(const OccupationVector& occ) const {
        auto it = terms_.find(occ);
        return it == terms_.end() ? Complex{} : it->second;
    }

    double norm_squared() const {
        double s = 0.0;
        for (const auto& [occ, amp] : terms_) {
            s += std::norm(amp);
        }
        return s;
    }
    double norm() const { return std::sqrt(norm_squared()); }

    PureState with_cutoff(std::optional<int> cutoff) const {
        PureState out(Terms{}, cutoff, truncated_);
        for (const auto& [occ, amp] : terms_) {
            if (cutoff && occ.total() > *cutoff) {
                out.truncated_ = true;
            } else {
                out.terms_.emplace(occ, amp);
            }
        }
        return out;
    }

    PureState pruned(double tolerance = kPruneTolerance) const {
        PureState out(Terms{}, cutoff_, truncated_);
        for (const auto& [occ, amp] : terms_) {
            if (std::abs(amp) >= tolerance) {
                out.terms_.emplace(occ, amp);
            }
        }
        return out;
    }

    PureState scaled(Complex factor) const {
        PureState out = *this;
        for (auto& [occ, amp] : out.terms_) {
            amp *= factor;
        }
        return out;
    }

    /// Largest photon count over all terms, or 0 for the zero state.
    int max_photons() const {
        int m = 0;
        for (const auto& [occ, amp] : terms_) {
            m = std::max(m, occ.total());
        }
        return m;
    }

private:
    Terms terms_;
    std::optional<int> cutoff_;
    bool truncated_ = false;
};

namespace detail {

inline std::optional<int> tighter_cutoff(std::optional<int> lhs, std::optional<int> rhs) {
    if (!lhs) {
        return rhs;
    }
    if (!rhs) {
        return lhs;
    }
    return std::min(*lhs, *rhs);
}

}  // namespace detail

inline PureState vacuum(std::optional<int> cutoff = std::nullopt) {
    return PureState(PureState::Terms{{OccupationVector{}, Complex{1.0, 0.0}}}, cutoff);
}

/// Creation operator on `mode`, with bosonic factor sqrt(n + 1).
inline PureState apply_create(const PureState& state, ModeId mode) {
    PureState::Terms out;
    bool truncated = state.truncated();
    for (const auto& [occ, amp] : state.terms()) {
        if (state.cutoff() && occ.total() + 1 > *state.cutoff()) {
            truncated = true;
            continue;
        }
        OccupationVector next = occ;
        const int n = occ[mode];
        next.set(mode, n + 1);
        out.emplace(next, amp * std::sqrt(static_cast<double>(n + 1)));
    }
    return PureState(std::move(out), state.cutoff(), truncated);
}

/// Annihilation operator on `mode`, with bosonic factor sqrt(n).
inline PureState apply_annihilate(const PureState& state, ModeId mode) {
    PureState::Terms out;
    for (const auto& [occ, amp] : state.terms()) {
        const int n = occ[mode];
        if (n == 0) {
            continue;
        }
        OccupationVector next = occ;
        next.set(mode, n - 1);
        out.emplace(next, amp * std::sqrt(static_cast<double>(n)));
    }
    return PureState(std::move(out), state.cutoff(), state.truncated());
}

/// <lhs|rhs>.
inline Complex inner(const PureState& lhs, const PureState& rhs) {
    const auto& small = lhs.size() <= rhs.size() ? lhs.terms() : rhs.terms();
    const auto& large = lhs.size() <= rhs.size() ? rhs.terms() : lhs.terms();
    const bool lhs_is_small = lhs.size() <= rhs.size();
    Complex s = 0.0;
    for (const auto& [occ, amp] : small) {
        auto it = large.find(occ);
        if (it == large.end()) {
            continue;
        }
        s += lhs_is_small ? std::conj(amp) * it->second : std::conj(it->second) * amp;
    }
    return s;
}

/// acc + coeff * s, pruned at `prune_tolerance`.
inline PureState add_scaled(const PureState& acc, const PureState& s, Complex coeff,
                            double prune_tolerance = kPruneTolerance) {
    PureState::Terms out = acc.terms();
    for (const auto& [occ, amp] : s.terms()) {
        out[occ] += coeff * amp;
    }
    std::erase_if(out, [&](const auto& kv) { return std::abs(kv.second) < prune_tolerance; });
    return PureState(std::move(out), detail::tighter_cutoff(acc.cutoff(), s.cutoff()),
                     acc.truncated() || s.truncated());
}

struct Normalized {
    PureState state;
    double norm = 0.0;
};

/// Unit-norm copy of `s` together with its original norm.
inline Normalized normalize(const PureState& s) {
    const double n = s.norm();
    if (!(n > 0.0)) {
        throw Error("zero-norm state");
    }
    return {s.scaled(1.0 / n), n};
}

/// Keeps only the terms with no photons outside `keep`.
inline PureState restrict(const PureState& s, const ModeSet& keep) {
    PureState::Terms out;
    for (const auto& [occ, amp] : s.terms()) {
        if (occ.outside(keep) == 0) {
            out.emplace(occ, amp);
        }
    }
    return PureState(std::move(out), s.cutoff(), s.truncated());
}

/// Largest |lhs - rhs| over the union of supports.
inline double max_amplitude_diff(const PureState& lhs, const PureState& rhs) {
    double worst = 0.0;
    for (const auto& [occ, amp] : lhs.terms()) {
        worst = std::max(worst, std::abs(amp - rhs.amplitude(occ)));
    }
    for (const auto& [occ, amp] : rhs.terms()) {
        worst = std::max(worst, std::abs(amp - lhs.amplitude(occ)));
    }
    return worst;
}

}  // namespace swapsim

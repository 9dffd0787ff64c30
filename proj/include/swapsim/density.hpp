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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swapsim/fock.hpp"
#include "swapsim/matrix.hpp"

namespace swapsim {

/// Photon numbers (x, y) on one side of the a|d bipartition.
struct SideOccupation {
    int nx = 0;
    int ny = 0;

    int total() const { return nx + ny; }
    auto operator<=>(const SideOccupation&) const = default;
};

inline SideOccupation side_a(const OccupationVector& occ) { return {occ[modes::a_x], occ[modes::a_y]}; }
inline SideOccupation side_d(const OccupationVector& occ) { return {occ[modes::d_x], occ[modes::d_y]}; }

inline OccupationVector compose_sides(SideOccupation a, SideOccupation d) {
    return OccupationVector{{modes::a_x, a.nx}, {modes::a_y, a.ny}, {modes::d_x, d.nx}, {modes::d_y, d.ny}};
}

/// All single-side occupations with at most `max_photons` photons, ordered by
/// photon number and then by descending x count: 00, 10, 01, 20, 11, 02, ...
inline std::vector<SideOccupation> side_basis(int max_photons) {
    std::vector<SideOccupation> out;
    for (int n = 0; n <= max_photons; ++n) {
        for (int nx = n; nx >= 0; --nx) {
            out.push_back({nx, n - nx});
        }
    }
    return out;
}

/// Hermitian operator over an explicit list of a,d occupation vectors.
class DensityMatrix {
public:
    DensityMatrix() = default;
    DensityMatrix(std::vector<OccupationVector> basis, Matrix entries)
        : basis_(std::move(basis)), entries_(std::move(entries)) {
        if (entries_.rows() != basis_.size() || entries_.cols() != basis_.size()) {
            throw Error("DensityMatrix: entries do not match basis size");
        }
    }

    /// |psi><psi| expressed over `basis`; components outside it are an error.
    static DensityMatrix from_pure(const PureState& psi, std::vector<OccupationVector> basis) {
        const std::size_t n = basis.size();
        DensityMatrix rho(std::move(basis), Matrix(n, n));
        rho.add_projector(psi);
        return rho;
    }

    std::size_t dim() const { return basis_.size(); }
    const std::vector<OccupationVector>& basis() const { return basis_; }
    const Matrix& entries() const { return entries_; }
    Complex operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

    /// (side a, side d) labels of basis state i.
    std::pair<SideOccupation, SideOccupation> partition(std::size_t i) const {
        return {side_a(basis_[i]), side_d(basis_[i])};
    }

    std::optional<std::size_t> index_of(const OccupationVector& occ) const {
        auto it = std::find(basis_.begin(), basis_.end(), occ);
        if (it == basis_.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - basis_.begin());
    }

    double trace() const { return entries_.trace().real(); }

    DensityMatrix normalized() const {
        const double t = trace();
        if (!(t > 0.0)) {
            throw Error("DensityMatrix: trace is not positive");
        }
        return DensityMatrix(basis_, Complex{1.0 / t} * entries_);
    }

    /// rho += |psi><psi|.
    void add_projector(const PureState& psi) {
        std::vector<std::pair<std::size_t, Complex>> coords;
        for (const auto& [occ, amp] : psi.terms()) {
            auto idx = index_of(occ);
            if (!idx) {
                throw Error("DensityMatrix: state has support outside the basis: " + occ.label());
            }
            coords.emplace_back(*idx, amp);
        }
        for (auto [i, ai] : coords) {
            for (auto [j, aj] : coords) {
                entries_(i, j) += ai * std::conj(aj);
            }
        }
    }

    /// <psi|rho|psi>; components of psi outside the basis contribute nothing.
    Complex expectation(const PureState& psi) const {
        std::vector<std::pair<std::size_t, Complex>> coords;
        for (const auto& [occ, amp] : psi.terms()) {
            if (auto idx = index_of(occ)) {
                coords.emplace_back(*idx, amp);
            }
        }
        Complex s = 0.0;
        for (auto [i, ai] : coords) {
            for (auto [j, aj] : coords) {
                s += std::conj(ai) * entries_(i, j) * aj;
            }
        }
        return s;
    }

private:
    std::vector<OccupationVector> basis_;
    Matrix entries_;
};

/// Basis of the full a|d product space side_basis(n) x side_basis(n), with
/// side a as the slow index.
inline std::vector<OccupationVector> product_basis(int max_side_photons) {
    std::vector<OccupationVector> out;
    const auto side = side_basis(max_side_photons);
    for (auto a : side) {
        for (auto d : side) {
            out.push_back(compose_sides(a, d));
        }
    }
    return out;
}

/// Re-expresses rho on the product basis with n = max(2, largest per-side
/// photon number). Throws if any basis state has photons outside a and d.
inline DensityMatrix embed_product(const DensityMatrix& rho) {
    const ModeSet ad = ModeSet::of_spatial({Spatial::a, Spatial::d});
    int max_side = 2;
    for (const auto& occ : rho.basis()) {
        if (occ.outside(ad) != 0) {
            throw Error("basis is not partition-factorizable: " + occ.label());
        }
        max_side = std::max({max_side, side_a(occ).total(), side_d(occ).total()});
    }
    auto basis = product_basis(max_side);
    Matrix entries(basis.size(), basis.size());
    std::vector<std::size_t> where(rho.dim());
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        where[i] = static_cast<std::size_t>(std::find(basis.begin(), basis.end(), rho.basis()[i]) - basis.begin());
    }
    for (std::size_t i = 0; i < rho.dim(); ++i) {
        for (std::size_t j = 0; j < rho.dim(); ++j) {
            entries(where[i], where[j]) = rho(i, j);
        }
    }
    return DensityMatrix(std::move(basis), std::move(entries));
}

}  // namespace swapsim

namespace swapsim {

/// "0", "x", "y", "x^2", "xy", "y^2", "x^2y", ...
inline std::string side_label(SideOccupation s) {
    if (s.total() == 0) {
        return "0";
    }
    auto part = [](char p, int n) -> std::string {
        if (n == 0) {
            return "";
        }
        return n == 1 ? std::string(1, p) : std::string(1, p) + "^" + std::to_string(n);
    };
    if (s.nx == 1 && s.ny == 1) {
        return "xy";
    }
    return part('x', s.nx) + part('y', s.ny);
}

/// Ket label "|A,D>" of a state on modes a and d, e.g. "|y^2,0>" or "|x,y>".
inline std::string ad_label(const OccupationVector& occ) {
    return "|" + side_label(side_a(occ)) + "," + side_label(side_d(occ)) + ">";
}

}  // namespace swapsim

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
#include <cmath>
#include <complex>
#include <vector>

#include "swapsim/fock.hpp"
#include "swapsim/matrix.hpp"

namespace swapsim {

struct JacobiOptions {
    double hermitian_tolerance = 1e-10;
    /// Sweeps stop once the off-diagonal Frobenius norm drops below this
    /// (scaled by max(1, ||A||_F)).
    double off_diagonal_tolerance = 1e-13;
    int max_sweeps = 100;
    std::size_t max_dimension = 100;
};

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi
/// rotations.
inline std::vector<double> eig_hermitian(const Matrix& m, const JacobiOptions& opts = {}) {
    if (!m.is_square() || m.hermiticity_defect() > opts.hermitian_tolerance) {
        throw Error("not Hermitian");
    }
    const std::size_t n = m.rows();
    if (n > opts.max_dimension) {
        throw Error("eig_hermitian: dimension exceeds supported maximum");
    }
    // Symmetrize so rounding in the input cannot leak into the rotations.
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = m(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex z = 0.5 * (m(i, j) + std::conj(m(j, i)));
            a(i, j) = z;
            a(j, i) = std::conj(z);
        }
    }
    const double threshold = opts.off_diagonal_tolerance * std::max(1.0, a.frobenius_norm());

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                s += 2.0 * std::norm(a(i, j));
            }
        }
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < opts.max_sweeps && off_norm() > threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag == 0.0) {
                    continue;
                }
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] makes the
                // (p, q) block diagonal in G^dagger A G.
                const Complex phase = a(p, q) / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const Complex gqp = -s * std::conj(phase);
                const Complex gqq = c * std::conj(phase);
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = c * akp + gqp * akq;
                    a(k, q) = s * akp + gqq * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(gqp) * aqk;
                    a(q, k) = s * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    if (off_norm() > threshold) {
        throw Error("eig_hermitian: Jacobi sweeps did not converge");
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) {
        eig[i] = a(i, i).real();
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace swapsim

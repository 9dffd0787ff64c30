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

// Multi-restart pattern search for the best Bell fidelity reachable with
// passive linear optics, either per side (2x2 on a, 2x2 on d) or globally
// (4x4 over a_x, a_y, d_x, d_y).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <numbers>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "swapsim/detect.hpp"
#include "swapsim/elements.hpp"
#include "swapsim/entangle.hpp"

namespace swapsim {

/// General U(2): e^{i alpha} [[e^{i beta} cos t, e^{i gamma} sin t], [-e^{-i gamma} sin t, e^{-i beta} cos t]].
inline Matrix u2_from_angles(std::span<const double, 4> angles) {
    const auto [alpha, beta, gamma, t] = std::array{angles[0], angles[1], angles[2], angles[3]};
    const Complex g = std::polar(1.0, alpha);
    return Matrix{{g * std::polar(std::cos(t), beta), g * std::polar(std::sin(t), gamma)},
                  {-g * std::polar(std::sin(t), -gamma), g * std::polar(std::cos(t), -beta)}};
}

/// U(4) as a phase layer times six Givens rotations, one per mode pair
/// (12 + 4 = 16 angles). All zeros gives the identity.
inline Matrix u4_from_angles(std::span<const double, 16> angles) {
    Matrix u = Matrix::identity(4);
    std::size_t k = 0;
    for (std::size_t p = 0; p < 4; ++p) {
        for (std::size_t q = p + 1; q < 4; ++q) {
            const double t = angles[k++];
            const double phi = angles[k++];
            Matrix g = Matrix::identity(4);
            g(p, p) = std::cos(t);
            g(p, q) = -std::polar(std::sin(t), phi);
            g(q, p) = std::polar(std::sin(t), -phi);
            g(q, q) = std::cos(t);
            u = g * u;
        }
    }
    Matrix d(4, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        d(i, i) = std::polar(1.0, angles[k++]);
    }
    return d * u;
}

/// Block-diagonal 4x4 over (a_x, a_y, d_x, d_y).
inline PassiveUnitary local_unitary(const Matrix& side_a_u, const Matrix& side_d_u) {
    Matrix m(4, 4);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            m(i, j) = side_a_u(i, j);
            m(i + 2, j + 2) = side_d_u(i, j);
        }
    }
    return {{kTakagiModes.begin(), kTakagiModes.end()}, std::move(m)};
}

struct FidelitySearchOptions {
    int restarts = 50;
    std::uint64_t seed = 42;
    double initial_step = 0.5;
    double min_step = 1e-9;
    long max_evaluations_per_restart = 200000;
    bool parallel = true;
};

struct PatternSearchResult {
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
    long evaluations = 0;
};

/// Hooke-Jeeves pattern search maximizing f: exploratory +-step moves on
/// every coordinate, followed by a pattern move along the last successful
/// displacement. The step halves when exploration finds nothing better.
inline PatternSearchResult pattern_search(const std::function<double(std::span<const double>)>& f,
                                          std::vector<double> x, const FidelitySearchOptions& opts) {
    PatternSearchResult r{x, f(x), 1};
    auto explore = [&](std::vector<double> point, double value, double step) {
        for (std::size_t i = 0; i < point.size(); ++i) {
            for (double dir : {1.0, -1.0}) {
                point[i] += dir * step;
                const double v = f(point);
                ++r.evaluations;
                if (v > value) {
                    value = v;
                    break;
                }
                point[i] -= dir * step;
            }
        }
        return std::pair{std::move(point), value};
    };

    double step = opts.initial_step;
    while (step > opts.min_step && r.evaluations < opts.max_evaluations_per_restart) {
        auto [next, value] = explore(r.x, r.value, step);
        if (!(value > r.value)) {
            step *= 0.5;
            continue;
        }
        // Keep extrapolating while the pattern move pays off.
        while (r.evaluations < opts.max_evaluations_per_restart) {
            std::vector<double> pattern(next.size());
            for (std::size_t i = 0; i < next.size(); ++i) {
                pattern[i] = 2.0 * next[i] - r.x[i];
            }
            r.x = next;
            r.value = value;
            const double pattern_value = f(pattern);
            ++r.evaluations;
            auto [candidate, candidate_value] = explore(std::move(pattern), pattern_value, step);
            if (!(candidate_value > r.value)) {
                break;
            }
            next = std::move(candidate);
            value = candidate_value;
        }
    }
    return r;
}

/// Deterministic per-restart generator derived from (seed, restart).
inline std::mt19937_64 restart_rng(std::uint64_t seed, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    return std::mt19937_64(seq);
}

/// Runs `restarts` pattern searches from random angle vectors (restart 0
/// starts at all zeros). Results are identical with and without threading.
inline std::vector<PatternSearchResult> multi_restart(const std::function<double(std::span<const double>)>& f,
                                                      std::size_t dimension, const FidelitySearchOptions& opts) {
    if (opts.restarts < 1) {
        throw Error("fidelity search: restarts must be >= 1");
    }
    auto one = [&](int restart) {
        std::vector<double> x0(dimension, 0.0);
        if (restart > 0) {
            auto rng = restart_rng(opts.seed, restart);
            std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
            for (auto& v : x0) {
                v = angle(rng);
            }
        }
        return pattern_search(f, std::move(x0), opts);
    };
    std::vector<PatternSearchResult> results(static_cast<std::size_t>(opts.restarts));
    if (!opts.parallel) {
        for (int i = 0; i < opts.restarts; ++i) {
            results[static_cast<std::size_t>(i)] = one(i);
        }
        return results;
    }
    const int width = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    for (int begin = 0; begin < opts.restarts; begin += width) {
        std::vector<std::future<PatternSearchResult>> batch;
        const int end = std::min(opts.restarts, begin + width);
        for (int i = begin; i < end; ++i) {
            batch.push_back(std::async(std::launch::async, one, i));
        }
        for (int i = begin; i < end; ++i) {
            results[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i - begin)].get();
        }
    }
    return results;
}

/// max over Bell states of |<Bell| U psi>|^2 / <psi|psi>.
inline BellScore bell_fidelity_after(const PureState& psi, const PassiveUnitary& u) {
    return best_bell_fidelity(apply_passive(psi, u));
}

struct LocalFidelityResult {
    double value = 0.0;
    BellKind best_bell = BellKind::psi_minus;
    Matrix side_a;
    Matrix side_d;
    std::vector<double> restart_values;
    long evaluations = 0;
};

struct GlobalFidelityResult {
    double value = 0.0;
    BellKind best_bell = BellKind::psi_minus;
    PassiveUnitary unitary;
    std::vector<double> restart_values;
    long evaluations = 0;
};

inline LocalFidelityResult max_bell_fidelity_local(const PureState& phi, const FidelitySearchOptions& opts = {}) {
    const PureState unit = normalize(phi).state;
    auto unitary_of = [](std::span<const double> x) {
        return local_unitary(u2_from_angles(x.subspan<0, 4>()), u2_from_angles(x.subspan<4, 4>()));
    };
    auto objective = [&](std::span<const double> x) { return bell_fidelity_after(unit, unitary_of(x)).fidelity; };
    const auto runs = multi_restart(objective, 8, opts);

    LocalFidelityResult out;
    std::size_t best = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        out.restart_values.push_back(runs[i].value);
        out.evaluations += runs[i].evaluations;
        if (runs[i].value > runs[best].value) {
            best = i;
        }
    }
    std::span<const double> x = runs[best].x;
    out.value = runs[best].value;
    out.side_a = u2_from_angles(x.subspan<0, 4>());
    out.side_d = u2_from_angles(x.subspan<4, 4>());
    out.best_bell = bell_fidelity_after(unit, unitary_of(x)).kind;
    return out;
}

inline LocalFidelityResult max_bell_fidelity_local(const ConditionalState& phi,
                                                   const FidelitySearchOptions& opts = {}) {
    return max_bell_fidelity_local(phi.state, opts);
}

inline GlobalFidelityResult max_bell_fidelity_global(const PureState& phi, const FidelitySearchOptions& opts = {}) {
    const PureState unit = normalize(phi).state;
    auto unitary_of = [](std::span<const double> x) {
        return PassiveUnitary{{kTakagiModes.begin(), kTakagiModes.end()}, u4_from_angles(x.first<16>())};
    };
    auto objective = [&](std::span<const double> x) { return bell_fidelity_after(unit, unitary_of(x)).fidelity; };
    const auto runs = multi_restart(objective, 16, opts);

    GlobalFidelityResult out;
    std::size_t best = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        out.restart_values.push_back(runs[i].value);
        out.evaluations += runs[i].evaluations;
        if (runs[i].value > runs[best].value) {
            best = i;
        }
    }
    out.value = runs[best].value;
    out.unitary = unitary_of(runs[best].x);
    out.best_bell = bell_fidelity_after(unit, out.unitary).kind;
    return out;
}

inline GlobalFidelityResult max_bell_fidelity_global(const ConditionalState& phi,
                                                     const FidelitySearchOptions& opts = {}) {
    return max_bell_fidelity_global(phi.state, opts);
}

}  // namespace swapsim

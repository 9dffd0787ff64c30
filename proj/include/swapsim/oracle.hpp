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

// Exact cross-check of the pipeline.
//
// Amplitudes live in the ring {p + q sqrt2 : p, q rational}. The expansion
// is carried out on commuting creation-operator polynomials, independently
// of the floating-point Fock engine, and the spectra are obtained with a
// different eigen-method (shifted power iteration with deflation, refined
// by Rayleigh-quotient steps) than the engine's Jacobi sweeps.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "swapsim/density.hpp"
#include "swapsim/detect.hpp"
#include "swapsim/fock.hpp"
#include "swapsim/matrix.hpp"

namespace swapsim::oracle {

using Rational = boost::multiprecision::cpp_rational;

/// p + q * sqrt2 with exact rationals.
class ExactAmplitude {
public:
    ExactAmplitude() = default;
    ExactAmplitude(Rational p, Rational q) : p_(std::move(p)), q_(std::move(q)) {}
    ExactAmplitude(Rational p) : p_(std::move(p)) {}  // NOLINT(google-explicit-constructor)
    template <std::integral I>
    ExactAmplitude(I p) : p_(p) {}  // NOLINT(google-explicit-constructor)

    static ExactAmplitude sqrt2() { return {0, 1}; }
    static ExactAmplitude inv_sqrt2() { return {0, Rational(1, 2)}; }

    /// sqrt(n) for n = k^2 or n = 2 k^2; anything else is outside the ring.
    static ExactAmplitude sqrt_of(long n) {
        for (long k = 0; k * k <= n; ++k) {
            if (k * k == n) {
                return {k, 0};
            }
            if (2 * k * k == n) {
                return {0, k};
            }
        }
        throw Error("amplitude leaves the ring Q(sqrt2): sqrt(" + std::to_string(n) + ")");
    }

    const Rational& rational_part() const { return p_; }
    const Rational& sqrt2_part() const { return q_; }
    bool is_zero() const { return p_ == 0 && q_ == 0; }

    double to_double() const {
        return p_.convert_to<double>() + q_.convert_to<double>() * std::numbers::sqrt2;
    }

    /// "1/2", "-1/2*sqrt(2)", "1 + sqrt(2)", ...
    std::string to_string() const {
        if (q_ == 0) {
            return p_.str();
        }
        const Rational mag = q_ < 0 ? Rational(-q_) : q_;
        const std::string surd = (mag == 1 ? std::string() : mag.str() + "*") + "sqrt(2)";
        if (p_ == 0) {
            return (q_ < 0 ? "-" : "") + surd;
        }
        return p_.str() + (q_ < 0 ? " - " : " + ") + surd;
    }

    friend ExactAmplitude operator+(const ExactAmplitude& l, const ExactAmplitude& r) {
        return {l.p_ + r.p_, l.q_ + r.q_};
    }
    friend ExactAmplitude operator-(const ExactAmplitude& l, const ExactAmplitude& r) {
        return {l.p_ - r.p_, l.q_ - r.q_};
    }
    friend ExactAmplitude operator*(const ExactAmplitude& l, const ExactAmplitude& r) {
        return {l.p_ * r.p_ + 2 * l.q_ * r.q_, l.p_ * r.q_ + l.q_ * r.p_};
    }
    ExactAmplitude operator-() const { return {-p_, -q_}; }
    ExactAmplitude& operator+=(const ExactAmplitude& r) { return *this = *this + r; }

    /// Division by a nonzero ring element, via the conjugate p - q sqrt2.
    friend ExactAmplitude operator/(const ExactAmplitude& l, const ExactAmplitude& r) {
        const Rational denom = r.p_ * r.p_ - 2 * r.q_ * r.q_;
        if (denom == 0) {
            throw Error("ExactAmplitude: division by zero");
        }
        const ExactAmplitude num = l * ExactAmplitude{r.p_, -r.q_};
        return {num.p_ / denom, num.q_ / denom};
    }

    bool operator==(const ExactAmplitude&) const = default;

private:
    Rational p_ = 0;
    Rational q_ = 0;
};

struct ExactTerm {
    ExactAmplitude value;
    int xi_power = 0;
};

/// Exact terms keyed by occupation. Depending on context the key is a Fock
/// basis state or the exponent vector of a creation-operator monomial.
class ExactState {
public:
    using Terms = std::map<OccupationVector, ExactTerm>;

    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    bool truncated() const { return truncated_; }
    void mark_truncated() { truncated_ = true; }

    void add(const OccupationVector& key, const ExactAmplitude& value, int xi_power) {
        auto [it, inserted] = terms_.try_emplace(key, ExactTerm{value, xi_power});
        if (!inserted) {
            if (it->second.xi_power != xi_power) {
                throw Error("ExactState: inconsistent xi power for " + key.label());
            }
            it->second.value += value;
        }
        if (it->second.value.is_zero()) {
            terms_.erase(it);
        }
    }

    const ExactTerm* find(const OccupationVector& key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? nullptr : &it->second;
    }

    /// Sum of squared values with the xi powers stripped; requires real values.
    ExactAmplitude norm_squared_coefficient() const {
        ExactAmplitude s;
        for (const auto& [k, t] : terms_) {
            s += t.value * t.value;
        }
        return s;
    }

private:
    Terms terms_;
    bool truncated_ = false;
};

/// Polynomial product, dropping monomials of degree above `cutoff`.
inline ExactState multiply(const ExactState& lhs, const ExactState& rhs, std::optional<int> cutoff) {
    ExactState out;
    if (lhs.truncated() || rhs.truncated()) {
        out.mark_truncated();
    }
    for (const auto& [kl, tl] : lhs.terms()) {
        for (const auto& [kr, tr] : rhs.terms()) {
            OccupationVector k;
            for (std::size_t i = 0; i < kNumModes; ++i) {
                k.set_index(i, kl.at_index(i) + kr.at_index(i));
            }
            if (cutoff && k.total() > *cutoff) {
                out.mark_truncated();
                continue;
            }
            out.add(k, tl.value * tr.value, tl.xi_power + tr.xi_power);
        }
    }
    return out;
}

/// Source polynomial prod_s sum_{n<=order} (K_s)^n / n! with K_DC1 = a_x b_y - a_y b_x
/// and K_DC2 = c_x d_y - c_y d_x; each pair carries one power of xi.
inline ExactState exact_source_polynomial(int order) {
    const int cutoff = 2 * order;
    auto pair_creator = [](Spatial s, Spatial i) {
        ExactState k;
        k.add(OccupationVector{{{s, Polarization::x}, 1}, {{i, Polarization::y}, 1}}, 1, 1);
        k.add(OccupationVector{{{s, Polarization::y}, 1}, {{i, Polarization::x}, 1}}, -1, 1);
        return k;
    };
    ExactState total;
    total.add(OccupationVector{}, 1, 0);
    for (auto [s, i] : {std::pair{Spatial::a, Spatial::b}, std::pair{Spatial::c, Spatial::d}}) {
        const ExactState k = pair_creator(s, i);
        ExactState series;
        series.add(OccupationVector{}, 1, 0);
        ExactState power = series;
        Rational factorial = 1;
        for (int n = 1; n <= order; ++n) {
            power = multiply(power, k, cutoff);
            factorial *= n;
            for (const auto& [key, t] : power.terms()) {
                series.add(key, t.value * ExactAmplitude(Rational(1) / factorial), t.xi_power);
            }
        }
        total = multiply(total, series, cutoff);
    }
    return total;
}

/// b_p -> (u_p + v_p)/sqrt2, c_p -> (u_p - v_p)/sqrt2 on a monomial polynomial.
inline ExactState exact_beam_splitter(const ExactState& poly) {
    const ExactAmplitude r = ExactAmplitude::inv_sqrt2();
    ExactState out;
    if (poly.truncated()) {
        out.mark_truncated();
    }
    for (const auto& [mono, t] : poly.terms()) {
        ExactState image;
        OccupationVector rest = mono;
        for (auto p : {Polarization::x, Polarization::y}) {
            rest.set({Spatial::b, p}, 0);
            rest.set({Spatial::c, p}, 0);
        }
        image.add(rest, t.value, t.xi_power);
        for (auto p : {Polarization::x, Polarization::y}) {
            const ModeId u{Spatial::u, p};
            const ModeId v{Spatial::v, p};
            ExactState from_b;
            from_b.add(OccupationVector{{u, 1}}, r, 0);
            from_b.add(OccupationVector{{v, 1}}, r, 0);
            ExactState from_c;
            from_c.add(OccupationVector{{u, 1}}, r, 0);
            from_c.add(OccupationVector{{v, 1}}, -r, 0);
            for (int k = 0; k < mono[{Spatial::b, p}]; ++k) {
                image = multiply(image, from_b, std::nullopt);
            }
            for (int k = 0; k < mono[{Spatial::c, p}]; ++k) {
                image = multiply(image, from_c, std::nullopt);
            }
        }
        for (const auto& [k, it] : image.terms()) {
            out.add(k, it.value, it.xi_power);
        }
    }
    return out;
}

/// Monomial coefficients -> Fock amplitudes (times sqrt(prod n!)).
inline ExactState fock_form(const ExactState& poly) {
    ExactState out;
    if (poly.truncated()) {
        out.mark_truncated();
    }
    for (const auto& [mono, t] : poly.terms()) {
        long f = 1;
        for (std::size_t i = 0; i < kNumModes; ++i) {
            for (int k = 2; k <= mono.at_index(i); ++k) {
                f *= k;
            }
        }
        out.add(mono, t.value * ExactAmplitude::sqrt_of(f), t.xi_power);
    }
    return out;
}

/// Coincidence projection on the post-beam-splitter polynomial, in Fock
/// form over modes a, d. Empty when nothing reaches both detectors.
inline ExactState exact_project(const ExactState& after_bs, const DetectionOutcome& outcome,
                                bool retain_all_orders = false) {
    const ModeId want_u{Spatial::u, outcome.at_u};
    const ModeId want_v{Spatial::v, outcome.at_v};
    ExactState selected;
    for (const auto& [mono, t] : after_bs.terms()) {
        bool ok = mono[want_u] == 1 && mono[want_v] == 1;
        ok = ok && mono[{Spatial::u, other(outcome.at_u)}] == 0 && mono[{Spatial::v, other(outcome.at_v)}] == 0;
        for (auto p : {Polarization::x, Polarization::y}) {
            ok = ok && mono[{Spatial::b, p}] == 0 && mono[{Spatial::c, p}] == 0;
        }
        if (!ok) {
            continue;
        }
        OccupationVector rest = mono;
        rest.set(want_u, 0);
        rest.set(want_v, 0);
        // The detector state u^dag v^dag |0> has unit norm, so no extra factor.
        selected.add(rest, t.value, t.xi_power);
    }
    ExactState fock = fock_form(selected);
    if (retain_all_orders || fock.empty()) {
        return fock;
    }
    int lowest = fock.terms().begin()->second.xi_power;
    for (const auto& [k, t] : fock.terms()) {
        lowest = std::min(lowest, t.xi_power);
    }
    ExactState leading;
    for (const auto& [k, t] : fock.terms()) {
        if (t.xi_power == lowest) {
            leading.add(k, t.value, t.xi_power);
        }
    }
    return leading;
}

struct ExactPipeline {
    int order = 0;
    /// Creation-operator polynomial of the two sources.
    ExactState source;
    /// Same polynomial after the beam splitter.
    ExactState after_beam_splitter;
    /// Fock-form conditional states on a, d; nullopt means no coincidence support.
    std::array<std::optional<ExactState>, 4> conditionals;

    bool has_coincidences() const {
        return std::all_of(conditionals.begin(), conditionals.end(), [](const auto& c) { return c.has_value(); });
    }
};

inline ExactPipeline exact_pipeline(int order, bool retain_all_orders = false) {
    if (order < 1 || order > 3) {
        throw Error("exact_pipeline: order must lie in [1, 3]");
    }
    ExactPipeline r;
    r.order = order;
    r.source = exact_source_polynomial(order);
    r.after_beam_splitter = exact_beam_splitter(r.source);
    for (std::size_t k = 0; k < kAllOutcomes.size(); ++k) {
        ExactState c = exact_project(r.after_beam_splitter, kAllOutcomes[k], retain_all_orders);
        if (!c.empty()) {
            r.conditionals[k] = std::move(c);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Independent eigensolver

namespace detail {

/// Solves A x = b by Gaussian elimination with partial pivoting; nullopt if
/// A is numerically singular.
inline std::optional<std::vector<Complex>> solve(Matrix a, std::vector<Complex> b) {
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) {
                piv = r;
            }
        }
        if (std::abs(a(piv, col)) < 1e-300) {
            return std::nullopt;
        }
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a(piv, k), a(col, k));
            }
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex f = a(r, col) / a(col, col);
            if (f == Complex{}) {
                continue;
            }
            for (std::size_t k = col; k < n; ++k) {
                a(r, k) -= f * a(col, k);
            }
            b[r] -= f * b[col];
        }
    }
    std::vector<Complex> x(n);
    for (std::size_t i = n; i-- > 0;) {
        Complex s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            s -= a(i, k) * x[k];
        }
        x[i] = s / a(i, i);
    }
    return x;
}

inline double vnorm(const std::vector<Complex>& v) {
    double s = 0.0;
    for (const auto& z : v) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

inline std::vector<Complex> matvec(const Matrix& a, const std::vector<Complex>& v) {
    std::vector<Complex> out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out[i] += a(i, j) * v[j];
        }
    }
    return out;
}

inline Complex dot(const std::vector<Complex>& l, const std::vector<Complex>& r) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
        s += std::conj(l[i]) * r[i];
    }
    return s;
}

}  // namespace detail

/// Eigenvalues (ascending) of a Hermitian matrix. The matrix is shifted to
/// be positive definite, the dominant pair is found by power iteration and
/// polished by Rayleigh-quotient iteration, then deflated away.
inline std::vector<double> eig_power_deflation(const Matrix& h, std::uint64_t seed = 7) {
    if (!h.is_square() || h.hermiticity_defect() > 1e-10) {
        throw Error("not Hermitian");
    }
    const std::size_t n = h.rows();
    const double shift = h.frobenius_norm() + 1.0;
    Matrix work = h + Complex{shift} * Matrix::identity(n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;

    std::vector<double> eig;
    for (std::size_t found = 0; found < n; ++found) {
        std::vector<Complex> v(n);
        for (auto& z : v) {
            z = {gauss(rng), gauss(rng)};
        }
        double nv = detail::vnorm(v);
        for (auto& z : v) {
            z /= nv;
        }
        double lambda = 0.0;
        for (int it = 0; it < 500; ++it) {
            auto w = detail::matvec(work, v);
            const double next = detail::dot(v, w).real();
            nv = detail::vnorm(w);
            if (nv == 0.0) {
                break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = w[i] / nv;
            }
            const bool settled = std::abs(next - lambda) < 1e-15 * std::abs(next);
            lambda = next;
            if (settled) {
                break;
            }
        }
        for (int it = 0; it < 8; ++it) {
            Matrix shifted = work - Complex{lambda} * Matrix::identity(n);
            auto x = detail::solve(shifted, v);
            if (!x) {
                break;
            }
            nv = detail::vnorm(*x);
            if (!(nv > 0.0) || !std::isfinite(nv)) {
                break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = (*x)[i] / nv;
            }
            const double next = detail::dot(v, detail::matvec(work, v)).real();
            const bool settled = std::abs(next - lambda) < 1e-15 * std::max(1.0, std::abs(next));
            lambda = next;
            if (settled) {
                break;
            }
        }
        eig.push_back(lambda - shift);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                work(i, j) -= lambda * v[i] * std::conj(v[j]);
            }
        }
    }
    std::sort(eig.begin(), eig.end());
    return eig;
}

// ---------------------------------------------------------------------------
// Exact mixture, Gram matrix, and partial-transpose spectrum

struct OracleSpectra {
    /// <phi_k|phi_l> with xi^4 factored out.
    std::array<std::array<ExactAmplitude, 4>, 4> gram;
    /// Trace of the normalized mixture, computed exactly.
    ExactAmplitude trace;
    std::vector<double> rho_spectrum;
    std::vector<double> pt_spectrum;
    double min_pt_eigenvalue = 0.0;
    double negativity = 0.0;
};

inline OracleSpectra exact_gram_and_pt_spectrum(const ExactPipeline& pipeline) {
    if (!pipeline.has_coincidences()) {
        throw Error("no coincidence support");
    }
    OracleSpectra out;
    for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t l = 0; l < 4; ++l) {
            ExactAmplitude s;
            for (const auto& [key, t] : pipeline.conditionals[k]->terms()) {
                if (const ExactTerm* o = pipeline.conditionals[l]->find(key)) {
                    s += t.value * o->value;  // all values are real
                }
            }
            out.gram[k][l] = s;
        }
    }

    // Per-side occupations (nx, ny) with at most max_side photons, side a slow.
    int max_side = 2;
    for (const auto& c : pipeline.conditionals) {
        for (const auto& [key, t] : c->terms()) {
            max_side = std::max({max_side, key[modes::a_x] + key[modes::a_y], key[modes::d_x] + key[modes::d_y]});
        }
    }
    std::vector<std::pair<int, int>> side;
    for (int nx = 0; nx <= max_side; ++nx) {
        for (int ny = 0; nx + ny <= max_side; ++ny) {
            side.emplace_back(nx, ny);
        }
    }
    const std::size_t s = side.size();
    auto side_index = [&](int nx, int ny) {
        return static_cast<std::size_t>(std::find(side.begin(), side.end(), std::pair{nx, ny}) - side.begin());
    };

    ExactAmplitude total_weight;
    for (std::size_t k = 0; k < 4; ++k) {
        total_weight += out.gram[k][k];
    }
    std::vector<std::vector<ExactAmplitude>> rho(s * s, std::vector<ExactAmplitude>(s * s));
    for (const auto& c : pipeline.conditionals) {
        std::vector<std::pair<std::size_t, ExactAmplitude>> coords;
        for (const auto& [key, t] : c->terms()) {
            coords.emplace_back(side_index(key[modes::a_x], key[modes::a_y]) * s +
                                    side_index(key[modes::d_x], key[modes::d_y]),
                                t.value);
        }
        for (const auto& [i, ai] : coords) {
            for (const auto& [j, aj] : coords) {
                rho[i][j] += ai * aj / total_weight;
            }
        }
    }
    for (std::size_t i = 0; i < s * s; ++i) {
        out.trace += rho[i][i];
    }

    Matrix rho_f(s * s, s * s);
    Matrix pt_f(s * s, s * s);
    for (std::size_t ia = 0; ia < s; ++ia) {
        for (std::size_t id = 0; id < s; ++id) {
            for (std::size_t ja = 0; ja < s; ++ja) {
                for (std::size_t jd = 0; jd < s; ++jd) {
                    rho_f(ia * s + id, ja * s + jd) = rho[ia * s + id][ja * s + jd].to_double();
                    pt_f(ia * s + id, ja * s + jd) = rho[ia * s + jd][ja * s + id].to_double();
                }
            }
        }
    }
    out.rho_spectrum = eig_power_deflation(rho_f);
    out.pt_spectrum = eig_power_deflation(pt_f);
    out.min_pt_eigenvalue = out.pt_spectrum.front();
    for (double lambda : out.pt_spectrum) {
        out.negativity += std::max(0.0, -lambda);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Term-by-term derivation of one conditional state

struct DerivationStep {
    /// Source monomial (creation-operator exponents) and its coefficient.
    OccupationVector source_monomial;
    ExactAmplitude source_coefficient;
    int xi_power = 0;
    /// Coefficient of u_{at_u}^dag v_{at_v}^dag in the beam-splitter image.
    ExactAmplitude routing_coefficient;
    /// Resulting a,d monomial and its contribution to the monomial coefficient.
    OccupationVector ad_monomial;
    ExactAmplitude contribution;
};

struct Derivation {
    DetectionOutcome outcome;
    std::vector<DerivationStep> steps;
    /// Collected Fock-form state (empty at too low an order).
    ExactState result;
};

inline Derivation explain_outcome(int order, const DetectionOutcome& outcome) {
    Derivation d{outcome, {}, {}};
    const ExactState source = exact_source_polynomial(order);
    for (const auto& [mono, t] : source.terms()) {
        ExactState single;
        single.add(mono, t.value, t.xi_power);
        const ExactState image = exact_beam_splitter(single);
        const ExactState projected = exact_project(image, outcome, true);
        if (projected.empty()) {
            continue;
        }
        OccupationVector ad = mono;
        for (auto p : {Polarization::x, Polarization::y}) {
            ad.set({Spatial::b, p}, 0);
            ad.set({Spatial::c, p}, 0);
        }
        // The image of a single monomial projects onto exactly one a,d monomial.
        const auto& [fock_key, fock_term] = *projected.terms().begin();
        long f = 1;
        for (std::size_t i = 0; i < kNumModes; ++i) {
            for (int k = 2; k <= fock_key.at_index(i); ++k) {
                f *= k;
            }
        }
        const ExactAmplitude monomial_coeff = fock_term.value / ExactAmplitude::sqrt_of(f);
        d.steps.push_back({mono, t.value, t.xi_power, monomial_coeff / t.value, ad, monomial_coeff});
    }
    const auto k = static_cast<std::size_t>(std::find(kAllOutcomes.begin(), kAllOutcomes.end(), outcome) -
                                            kAllOutcomes.begin());
    d.result = exact_pipeline(order).conditionals[k].value_or(ExactState{});
    return d;
}

/// Creation-monomial label, e.g. "a_x+ a_y+ b_x+ b_y+" or "(a_y+)^2 (b_x+)^2".
inline std::string monomial_label(const OccupationVector& mono) {
    std::string out;
    for (std::size_t i = 0; i < kNumModes; ++i) {
        const int n = mono.at_index(i);
        if (n == 0) {
            continue;
        }
        if (!out.empty()) {
            out += ' ';
        }
        const std::string op = ModeId::from_index(i).name() + "+";
        out += n == 1 ? op : "(" + op + ")^" + std::to_string(n);
    }
    return out.empty() ? "1" : out;
}

}  // namespace swapsim::oracle

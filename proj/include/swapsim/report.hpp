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

// Run configuration, structured reports, oracle verification and term-by-term
// derivations. This is the layer behind the `swapsim` command-line tool.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swapsim/detect.hpp"
#include "swapsim/entangle.hpp"
#include "swapsim/optimize.hpp"
#include "swapsim/oracle.hpp"
#include "swapsim/pipeline.hpp"

namespace swapsim::cli {

using Json = nlohmann::ordered_json;

/// Invalid user configuration (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class OutputFormat { text, structured };

struct RunConfig {
    double xi = 0.1;
    int order = 2;
    std::vector<double> xi_grid{0.2, 0.1, 0.05};
    int restarts = 50;
    std::uint64_t seed = 42;
    /// Spectral and fidelity tolerance; amplitudes use kCompareTolerance.
    double tolerance = 1e-9;
    OutputFormat format = OutputFormat::text;
    bool retain_all_orders = false;
    bool inject_beam_splitter_fault = false;

    void validate() const {
        if (!(xi > 0.0 && xi < 1.0)) {
            throw ConfigError("xi must lie in (0, 1)");
        }
        if (order < 1 || order > 3) {
            throw ConfigError("order must lie in [1, 3]");
        }
        if (restarts < 1) {
            throw ConfigError("restarts must be >= 1");
        }
        if (xi_grid.empty()) {
            throw ConfigError("xi grid must not be empty");
        }
        for (double g : xi_grid) {
            if (!(g > 0.0 && g < 1.0)) {
                throw ConfigError("xi grid values must lie in (0, 1)");
            }
        }
        if (!(tolerance > 0.0)) {
            throw ConfigError("tolerance must be positive");
        }
    }

    PipelineOptions pipeline(double at_xi) const {
        PipelineOptions p;
        p.pdc.xi = at_xi;
        p.pdc.order = order;
        p.projection.retain_all_orders = retain_all_orders;
        p.inject_beam_splitter_fault = inject_beam_splitter_fault;
        return p;
    }
    PipelineOptions pipeline() const { return pipeline(xi); }

    FidelitySearchOptions search() const {
        FidelitySearchOptions s;
        s.restarts = restarts;
        s.seed = seed;
        return s;
    }
};

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back(complex_json(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json vector_json(const auto& values) {
    Json out = Json::array();
    for (double v : values) {
        out.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verification against the oracle

struct Comparison {
    std::string group;
    std::string item;
    double engine = 0.0;
    double oracle = 0.0;
    double delta = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct VerifyReport {
    std::vector<Comparison> rows;

    bool passed() const {
        return std::all_of(rows.begin(), rows.end(), [](const Comparison& c) { return c.pass; });
    }
    const Comparison* first_failure() const {
        for (const auto& c : rows) {
            if (!c.pass) {
                return &c;
            }
        }
        return nullptr;
    }
    double max_delta(std::string_view group_prefix) const {
        double worst = 0.0;
        for (const auto& c : rows) {
            if (c.group.starts_with(group_prefix)) {
                worst = std::max(worst, c.delta);
            }
        }
        return worst;
    }
};

namespace detail {

inline void compare(VerifyReport& report, std::string group, std::string item, double engine, double oracle,
                    double tolerance) {
    const double delta = std::abs(engine - oracle);
    report.rows.push_back({std::move(group), std::move(item), engine, oracle, delta, tolerance,
                           std::isfinite(delta) && delta <= tolerance});
}

/// Compares amplitudes over the union of supports; `scale_engine` maps an
/// engine amplitude at an occupation onto the oracle's representation.
/// `absorbed_photons` counts photons removed by detection (each pair carries
/// one power of xi and two photons).
template <typename Scale>
void compare_amplitudes(VerifyReport& report, const std::string& group, const PureState& engine,
                        const oracle::ExactState& exact, double xi, Scale scale_engine, int absorbed_photons = 0) {
    for (const auto& [occ, t] : exact.terms()) {
        const Complex e = engine.amplitude(occ) * scale_engine(occ);
        const double o = t.value.to_double() * std::pow(xi, t.xi_power);
        compare(report, group, occ.label() + " re", e.real(), o, kCompareTolerance);
        compare(report, group, occ.label() + " im", e.imag(), 0.0, kCompareTolerance);
        if (2 * t.xi_power != occ.total() + absorbed_photons) {
            compare(report, group, occ.label() + " xi-power", t.xi_power, (occ.total() + absorbed_photons) / 2.0, 0.0);
        }
    }
    for (const auto& [occ, amp] : engine.terms()) {
        if (exact.find(occ) == nullptr) {
            compare(report, group, occ.label() + " (engine only)", std::abs(amp * scale_engine(occ)), 0.0,
                    kCompareTolerance);
        }
    }
}

}  // namespace detail

/// Replays the pipeline in exact arithmetic and compares every amplitude,
/// norm, Gram entry and spectrum with the floating-point engine. Conditional
/// states come first so a convention error is reported by outcome.
inline VerifyReport verify(const RunConfig& cfg) {
    cfg.validate();
    using detail::compare;
    VerifyReport report;
    const double xi = cfg.xi;
    const PipelineOptions popts = cfg.pipeline();
    const SourceStages stages = run_optics(popts);
    const oracle::ExactPipeline exact = oracle::exact_pipeline(cfg.order, cfg.retain_all_orders);
    const auto unit = [](const OccupationVector&) { return 1.0; };

    std::array<std::optional<ConditionalState>, 4> conds;
    for (std::size_t k = 0; k < kAllOutcomes.size(); ++k) {
        const std::string group = "conditional " + kAllOutcomes[k].label();
        try {
            conds[k] = project_outcome(stages.after_beam_splitter, kAllOutcomes[k], popts.projection);
        } catch (const Error&) {
            conds[k].reset();
        }
        compare(report, group, "coincidence support", conds[k].has_value() ? 1.0 : 0.0,
                exact.conditionals[k].has_value() ? 1.0 : 0.0, 0.0);
        if (conds[k] && exact.conditionals[k]) {
            detail::compare_amplitudes(report, group, conds[k]->state, *exact.conditionals[k], xi, unit, 2);
            compare(report, group, "norm^2", conds[k]->weight,
                    exact.conditionals[k]->norm_squared_coefficient().to_double() * std::pow(xi, 4),
                    kCompareTolerance);
        }
    }

    const bool all_present = std::all_of(conds.begin(), conds.end(), [](const auto& c) { return c.has_value(); });
    if (all_present && exact.has_coincidences()) {
        const oracle::OracleSpectra spectra = oracle::exact_gram_and_pt_spectrum(exact);
        for (std::size_t k = 0; k < 4; ++k) {
            for (std::size_t l = 0; l < 4; ++l) {
                const Complex g = inner(conds[k]->state, conds[l]->state);
                compare(report, "gram", kAllOutcomes[k].label() + kAllOutcomes[l].label(), g.real(),
                        spectra.gram[k][l].to_double() * std::pow(xi, 4), kCompareTolerance);
            }
        }
        const std::array<ConditionalState, 4> conditionals{*conds[0], *conds[1], *conds[2], *conds[3]};
        const DensityMatrix rho = mixture(conditionals);
        compare(report, "mixture", "trace", rho.trace(), spectra.trace.to_double(), kCompareTolerance);
        const auto rho_eig = eig_hermitian(embed_product(rho).entries());
        const auto pt_eig = pt_spectrum(rho);
        for (std::size_t i = 0; i < rho_eig.size() && i < spectra.rho_spectrum.size(); ++i) {
            compare(report, "mixture spectrum", "lambda[" + std::to_string(i) + "]", rho_eig[i],
                    spectra.rho_spectrum[i], cfg.tolerance);
        }
        compare(report, "mixture spectrum", "dimension", static_cast<double>(rho_eig.size()),
                static_cast<double>(spectra.rho_spectrum.size()), 0.0);
        for (std::size_t i = 0; i < pt_eig.size() && i < spectra.pt_spectrum.size(); ++i) {
            compare(report, "pt spectrum", "lambda[" + std::to_string(i) + "]", pt_eig[i], spectra.pt_spectrum[i],
                    cfg.tolerance);
        }
        compare(report, "pt spectrum", "dimension", static_cast<double>(pt_eig.size()),
                static_cast<double>(spectra.pt_spectrum.size()), 0.0);
        compare(report, "pt spectrum", "negativity", negativity(rho), spectra.negativity, cfg.tolerance);
    }

    detail::compare_amplitudes(report, "source", stages.source, oracle::fock_form(exact.source), xi, unit);
    compare(report, "source", "truncation flag", stages.source.truncated() ? 1.0 : 0.0,
            exact.source.truncated() ? 1.0 : 0.0, 0.0);
    // Post-beam-splitter Fock amplitudes can involve sqrt3; compare monomial
    // coefficients instead.
    detail::compare_amplitudes(report, "after beam splitter", stages.after_beam_splitter, exact.after_beam_splitter,
                               xi, [](const OccupationVector& occ) { return 1.0 / std::sqrt(occ.factorial_product()); });
    return report;
}

/// One line per comparison group: count, worst delta, tolerance, status.
inline std::string render_verify_table(const VerifyReport& report) {
    std::ostringstream out;
    out << "group                      checks   max |delta|   tolerance   status\n";
    std::vector<std::string> groups;
    for (const auto& c : report.rows) {
        if (std::find(groups.begin(), groups.end(), c.group) == groups.end()) {
            groups.push_back(c.group);
        }
    }
    for (const auto& g : groups) {
        std::size_t n = 0;
        double worst = 0.0;
        double tol = 0.0;
        bool ok = true;
        for (const auto& c : report.rows) {
            if (c.group == g) {
                ++n;
                worst = std::max(worst, c.delta);
                tol = std::max(tol, c.tolerance);
                ok = ok && c.pass;
            }
        }
        char line[160];
        std::snprintf(line, sizeof line, "%-26s %6zu   %11.3e   %9.1e   %s\n", g.c_str(), n, worst, tol,
                      ok ? "ok" : "FAIL");
        out << line;
    }
    if (const Comparison* f = report.first_failure()) {
        out << "first failure: " << f->group << ": " << f->item << " engine=" << Json(f->engine).dump()
            << " oracle=" << Json(f->oracle).dump() << " |delta|=" << Json(f->delta).dump()
            << " > " << Json(f->tolerance).dump() << "\n";
    } else {
        out << "all " << report.rows.size() << " comparisons within tolerance\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Report

/// |Psi-><Psi-| + xi * (white noise on the (1,1) sector), trace-normalized.
inline DensityMatrix noisy_singlet(double xi) {
    std::vector<OccupationVector> basis;
    for (auto pa : {Polarization::x, Polarization::y}) {
        for (auto pd : {Polarization::x, Polarization::y}) {
            basis.push_back(one_one(pa, pd));
        }
    }
    std::sort(basis.begin(), basis.end());
    DensityMatrix rho = DensityMatrix::from_pure(bell(BellKind::psi_minus).state, basis);
    Matrix noise = Complex{xi / 4.0} * Matrix::identity(4);
    return DensityMatrix(basis, rho.entries() + noise).normalized();
}

inline Json verdict_json(const EventReadyVerdict& v, const EventReadyRule& rule, double tolerance) {
    Json series = Json::array();
    for (auto [xi, score] : v.xi_series) {
        series.push_back(Json{{"xi", xi}, {"score", score}});
    }
    return Json{{"best_bell", bell_name(v.best_bell)},
                {"score", v.score},
                {"xi_series", std::move(series)},
                {"fit", Json{{"slope", v.fit_slope}, {"intercept", v.fit_intercept}, {"r2", v.fit_r2}}},
                {"rule", Json{{"min_score", rule.min_score}, {"max_intercept", rule.max_intercept}}},
                {"is_event_ready", v.is_event_ready},
                {"tolerance", tolerance}};
}

/// Full analysis of the configured apparatus. Deterministic given the config.
inline Json build_report(const RunConfig& cfg) {
    cfg.validate();
    const PipelineResult run = run_pipeline(cfg.pipeline());
    const oracle::ExactPipeline exact = oracle::exact_pipeline(cfg.order, cfg.retain_all_orders);

    Json report;
    report["tool"] = "swapsim";
    report["config"] = Json{{"xi", cfg.xi},
                            {"order", cfg.order},
                            {"xi_grid", vector_json(cfg.xi_grid)},
                            {"restarts", cfg.restarts},
                            {"seed", cfg.seed},
                            {"tolerance", cfg.tolerance},
                            {"retain_all_orders", cfg.retain_all_orders}};
    report["tolerances"] = Json{{"amplitude", kCompareTolerance},
                                {"prune", kPruneTolerance},
                                {"spectral", cfg.tolerance},
                                {"optimizer_step", FidelitySearchOptions{}.min_step}};
    report["truncation"] = Json{{"cutoff", cfg.pipeline().pdc.cutoff()},
                                {"source_truncated", run.stages.source.truncated()},
                                {"after_beam_splitter_truncated", run.stages.after_beam_splitter.truncated()}};

    Json conditionals = Json::array();
    Json weights = Json::object();
    for (std::size_t k = 0; k < run.conditionals.size(); ++k) {
        const ConditionalState& c = run.conditionals[k];
        Json terms = Json::array();
        for (const auto& [occ, amp] : c.state.terms()) {
            // Two photons were absorbed at the detectors.
            const int power = (occ.total() + 2) / 2;
            Json row{{"ket", ad_label(occ)}, {"xi_power", power}};
            const oracle::ExactTerm* t = exact.conditionals[k] ? exact.conditionals[k]->find(occ) : nullptr;
            row["coefficient"] = t != nullptr ? t->value.to_string() : "n/a";
            row["value"] = amp.real() / std::pow(cfg.xi, power);
            terms.push_back(std::move(row));
        }
        conditionals.push_back(Json{{"outcome", c.outcome.label()},
                                    {"term_count", c.state.size()},
                                    {"terms", std::move(terms)},
                                    {"norm_squared", c.weight},
                                    {"norm_squared_over_xi4", c.weight / std::pow(cfg.xi, 4)}});
        weights[c.outcome.label()] = c.weight / std::pow(cfg.xi, 4);
    }
    report["conditional_states"] = std::move(conditionals);
    report["weights_over_xi4"] = std::move(weights);

    report["mixture"] = Json{{"dimension", run.rho.dim()},
                             {"trace", run.rho.trace()},
                             {"spectrum", vector_json(eig_hermitian(run.rho.entries()))},
                             {"tolerance", cfg.tolerance}};
    const auto pt = pt_spectrum(run.rho);
    report["partial_transpose"] = Json{{"dimension", pt.size()},
                                       {"spectrum", vector_json(pt)},
                                       {"min_eigenvalue", pt.front()},
                                       {"negativity", negativity(run.rho)},
                                       {"entangled", pt.front() < -cfg.tolerance},
                                       {"tolerance", cfg.tolerance}};
    Json bell_fid = Json::object();
    for (auto kind : kAllBellKinds) {
        bell_fid[bell_name(kind)] = fidelity(run.rho, bell(kind));
    }
    report["mixture_bell_fidelity"] = std::move(bell_fid);

    Json bell_takagi = Json::object();
    for (auto kind : kAllBellKinds) {
        bell_takagi[bell_name(kind)] = vector_json(takagi_spectrum(bell(kind).state));
    }
    Json no_go = Json::array();
    const FidelitySearchOptions search = cfg.search();
    for (const ConditionalState& c : run.conditionals) {
        Json pure = Json::object();
        for (auto kind : kAllBellKinds) {
            pure[bell_name(kind)] = fidelity(c.state, bell(kind));
        }
        const auto local = max_bell_fidelity_local(c, search);
        const auto global = max_bell_fidelity_global(c, search);
        double bound = 0.0;
        double min_gap = INFINITY;
        const auto spectrum = takagi_spectrum(c.state);
        for (auto kind : kAllBellKinds) {
            bound = std::max(bound, takagi_fidelity_bound(c.state, bell(kind).state));
            const auto bs = takagi_spectrum(bell(kind).state);
            double gap = 0.0;
            for (std::size_t i = 0; i < 4; ++i) {
                gap = std::max(gap, std::abs(spectrum[i] - bs[i]));
            }
            min_gap = std::min(min_gap, gap);
        }
        no_go.push_back(Json{
            {"outcome", c.outcome.label()},
            {"bell_fidelity", std::move(pure)},
            {"local", Json{{"max_fidelity", local.value},
                           {"best_bell", bell_name(local.best_bell)},
                           {"unitary_a", matrix_json(local.side_a)},
                           {"unitary_d", matrix_json(local.side_d)},
                           {"evaluations", local.evaluations}}},
            {"global", Json{{"max_fidelity", global.value},
                            {"best_bell", bell_name(global.best_bell)},
                            {"unitary", matrix_json(global.unitary.matrix)},
                            {"evaluations", global.evaluations}}},
            {"takagi_spectrum", vector_json(spectrum)},
            {"takagi_gap_to_nearest_bell", min_gap},
            {"takagi_fidelity_bound", bound},
            {"tolerance", cfg.tolerance}});
    }
    report["bell_takagi_spectra"] = std::move(bell_takagi);
    report["no_go"] = std::move(no_go);

    const EventReadyRule rule;
    const auto verdict = event_ready_check(
        cfg.xi_grid, [&](double x) { return run_pipeline(cfg.pipeline(x)).rho; }, rule);
    report["event_ready"] = verdict_json(verdict, rule, cfg.tolerance);
    report["control_event_ready"] = verdict_json(event_ready_check(cfg.xi_grid, noisy_singlet, rule), rule, cfg.tolerance);

    const VerifyReport check = verify(cfg);
    report["oracle_deltas"] = Json{{"comparisons", check.rows.size()},
                                   {"max_conditional_delta", check.max_delta("conditional")},
                                   {"max_spectrum_delta", std::max(check.max_delta("pt spectrum"),
                                                                   check.max_delta("mixture spectrum"))},
                                   {"max_source_delta", check.max_delta("source")},
                                   {"max_beam_splitter_delta", check.max_delta("after beam splitter")},
                                   {"passed", check.passed()}};
    return report;
}

namespace detail {

inline bool is_scalar_array(const Json& j) {
    return j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
}

inline std::string scalar_text(const Json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

inline void render(std::ostringstream& out, const Json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_primitive()) {
                out << pad << key << ": " << scalar_text(value) << "\n";
            } else if (is_scalar_array(value)) {
                out << pad << key << ": " << value.dump() << "\n";
            } else {
                out << pad << key << ":\n";
                render(out, value, indent + 2);
            }
        }
    } else if (j.is_array()) {
        for (const auto& e : j) {
            if (e.is_object()) {
                // First key on the dash line, the rest indented beneath it.
                bool first = true;
                for (const auto& [key, value] : e.items()) {
                    const std::string lead = first ? pad + "- " : pad + "  ";
                    first = false;
                    if (value.is_primitive()) {
                        out << lead << key << ": " << scalar_text(value) << "\n";
                    } else if (is_scalar_array(value)) {
                        out << lead << key << ": " << value.dump() << "\n";
                    } else {
                        out << lead << key << ":\n";
                        render(out, value, indent + 4);
                    }
                }
            } else {
                out << pad << "- " << (e.is_primitive() ? scalar_text(e) : e.dump()) << "\n";
            }
        }
    }
}

}  // namespace detail

/// Human-readable rendering of a report. Numbers are printed with exactly
/// the same text as in the structured document.
inline std::string render_text(const Json& report) {
    std::ostringstream out;
    detail::render(out, report, 0);
    return out.str();
}

inline std::string render_structured(const Json& report) { return report.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Derivation

inline std::string explain(const DetectionOutcome& outcome, const RunConfig& cfg) {
    cfg.validate();
    const oracle::Derivation d = oracle::explain_outcome(cfg.order, outcome);
    std::ostringstream out;
    out << "outcome " << outcome.label() << ": one " << polarization_name(outcome.at_u) << "-polarized photon in D_u, one "
        << polarization_name(outcome.at_v) << "-polarized photon in D_v (order " << cfg.order << ")\n";
    if (d.steps.empty()) {
        out << "empty at this order: no source term sends one photon to each detector\n";
        return out.str();
    }
    out << "\nsource terms with one photon reaching each detector:\n";
    for (const auto& s : d.steps) {
        out << "  [" << s.source_coefficient.to_string() << "] xi^" << s.xi_power << "  "
            << oracle::monomial_label(s.source_monomial) << "\n"
            << "      beam splitter -> coefficient of u_" << polarization_name(outcome.at_u) << "+ v_"
            << polarization_name(outcome.at_v) << "+: " << s.routing_coefficient.to_string() << "\n"
            << "      leaves " << oracle::monomial_label(s.ad_monomial) << " with coefficient "
            << s.contribution.to_string() << "\n";
    }
    out << "\ncollected on modes a,d (Fock amplitudes, creation monomials times sqrt(n!)):\n";
    for (const auto& [occ, t] : d.result.terms()) {
        out << "  " << ad_label(occ) << "  " << t.value.to_string() << " * xi^" << t.xi_power << "   ["
            << Json(t.value.to_double() * std::pow(cfg.xi, t.xi_power)).dump() << " at xi=" << Json(cfg.xi).dump()
            << "]\n";
    }
    out << "\nresult: |phi" << outcome.label() << "> = ";
    bool first = true;
    for (const auto& [occ, t] : d.result.terms()) {
        const std::string v = t.value.to_string();
        const bool negative = v.starts_with("-");
        out << (first ? (negative ? "-" : "") : (negative ? " - " : " + ")) << "(" << (negative ? v.substr(1) : v)
            << ")" << ad_label(occ);
        first = false;
    }
    out << "   (times xi^" << d.result.terms().begin()->second.xi_power << ")\n";
    return out.str();
}

}  // namespace swapsim::cli

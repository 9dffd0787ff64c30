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

// swapsim: simulate the two-source entanglement-swapping apparatus and check
// its output against the exact oracle.
//
//   swapsim run     [--xi X] [--order N] [--xi-grid a,b,c] [--restarts R] [--seed S]
//                   [--tolerance T] [--format text|structured] [--out PATH]
//   swapsim verify  [same options]
//   swapsim explain --outcome x,y [same options]
//
// Exit codes: 0 success, 1 verification or computation failure, 2 usage or
// configuration error.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "swapsim/report.hpp"

namespace {

swapsim::DetectionOutcome parse_outcome(std::string text) {
    std::erase_if(text, [](char ch) { return ch == '(' || ch == ')' || ch == ',' || ch == ' '; });
    if (text.size() != 2 || (text[0] != 'x' && text[0] != 'y') || (text[1] != 'x' && text[1] != 'y')) {
        throw swapsim::cli::ConfigError("outcome must be one of x,x x,y y,x y,y");
    }
    auto pol = [](char ch) { return ch == 'x' ? swapsim::Polarization::x : swapsim::Polarization::y; };
    return {pol(text[0]), pol(text[1])};
}

int emit(const std::string& body, const std::string& path) {
    if (path.empty()) {
        std::cout << body;
        return 0;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        std::cerr << "error: cannot open " << path << " for writing\n";
        return 2;
    }
    file << body;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace swapsim::cli;

    CLI::App app{"Entanglement-swapping simulator with exact cross-checks"};
    app.set_config("--config", "", "Read options from a TOML/INI file (command-line flags win)");
    app.require_subcommand(1);

    RunConfig cfg;
    std::string format = "text";
    std::string outcome = "x,y";
    std::string out_path;

    app.add_option("--xi", cfg.xi, "Pair amplitude xi in (0,1)")->capture_default_str();
    app.add_option("--order", cfg.order, "Pairs retained per source (1-3)")->capture_default_str();
    app.add_option("--xi-grid", cfg.xi_grid, "Grid for the event-ready check")->delimiter(',')->capture_default_str();
    app.add_option("--restarts", cfg.restarts, "Optimizer restarts")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Optimizer seed")->capture_default_str();
    app.add_option("--tolerance", cfg.tolerance, "Spectral/fidelity tolerance")->capture_default_str();
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "structured"}))
        ->capture_default_str();
    app.add_option("--outcome", outcome, "Detector outcome for explain, e.g. x,y")->capture_default_str();
    app.add_option("--out", out_path, "Write the report here instead of stdout");
    app.add_flag("--retain-all-orders", cfg.retain_all_orders, "Keep every xi order in the projections");
    // Test hook for exercising verify; deliberately breaks the beam splitter.
    app.add_flag("--inject-fault", cfg.inject_beam_splitter_fault)->group("");

    auto* run = app.add_subcommand("run", "Run the full analysis and print a report");
    auto* verify_cmd = app.add_subcommand("verify", "Compare the engine with the exact oracle");
    auto* explain_cmd = app.add_subcommand("explain", "Derive one conditional state term by term");
    for (auto* sub : {run, verify_cmd, explain_cmd}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.format = format == "structured" ? OutputFormat::structured : OutputFormat::text;
        cfg.validate();
        if (*run) {
            const Json report = build_report(cfg);
            return emit(cfg.format == OutputFormat::structured ? render_structured(report) : render_text(report),
                        out_path);
        }
        if (*verify_cmd) {
            const VerifyReport report = verify(cfg);
            std::string body = render_verify_table(report);
            if (cfg.format == OutputFormat::structured) {
                Json rows = Json::array();
                for (const auto& c : report.rows) {
                    rows.push_back(Json{{"group", c.group}, {"item", c.item}, {"engine", c.engine},
                                        {"oracle", c.oracle}, {"delta", c.delta}, {"tolerance", c.tolerance},
                                        {"pass", c.pass}});
                }
                body = render_structured(Json{{"passed", report.passed()}, {"comparisons", std::move(rows)}});
            }
            const int written = emit(body, out_path);
            if (written != 0) {
                return written;
            }
            if (const Comparison* f = report.first_failure()) {
                std::cerr << "verification failed: " << f->group << ": " << f->item << "\n";
                return 1;
            }
            return 0;
        }
        return emit(explain(parse_outcome(outcome), cfg), out_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const swapsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

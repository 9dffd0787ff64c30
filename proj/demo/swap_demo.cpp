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

// Minimal use of the library: build the apparatus, print the four
// post-selected states and the partial-transpose verdict.

#include <cstdio>

#include "swapsim/entangle.hpp"
#include "swapsim/pipeline.hpp"

int main() {
    using namespace swapsim;
    PipelineOptions opts;
    opts.pdc.xi = 0.1;
    opts.pdc.order = 2;
    const PipelineResult r = run_pipeline(opts);

    for (const ConditionalState& c : r.conditionals) {
        std::printf("%s  weight/xi^4 = %.6f\n", c.outcome.label().c_str(), c.weight / 1e-4);
        for (const auto& [occ, amp] : c.state.terms()) {
            std::printf("    %-10s %+.6f xi^2\n", ad_label(occ).c_str(), amp.real() / 1e-2);
        }
    }
    std::printf("min PT eigenvalue %.12f, negativity %.12f\n", pt_spectrum(r.rho).front(), negativity(r.rho));
    std::printf("best Bell fidelity of the mixture %.12f\n", best_bell_fidelity(r.rho).fidelity);
    return 0;
}

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
#include <numbers>

#include "swapsim/detect.hpp"
#include "swapsim/elements.hpp"

namespace swapsim {

struct PipelineOptions {
    PdcConfig pdc;
    BeamSplitterPorts ports;
    ProjectionOptions projection;
    /// Test hook: flips the sign convention of the y-polarized beam splitter
    /// (b_y -> (u_y - v_y)/sqrt2, c_y -> (u_y + v_y)/sqrt2).
    bool inject_beam_splitter_fault = false;
};

inline BeamSplitterMatrices pipeline_beam_splitter(const PipelineOptions& opts) {
    auto t = symmetric_beam_splitter();
    if (opts.inject_beam_splitter_fault) {
        const double r = 1.0 / std::numbers::sqrt2;
        t[static_cast<std::size_t>(Polarization::y)] = Matrix{{r, r}, {-r, r}};
    }
    return t;
}

struct SourceStages {
    PureState source;
    PureState after_beam_splitter;
};

/// Down-converters followed by the beam splitter, before any detection.
inline SourceStages run_optics(const PipelineOptions& opts) {
    SourceStages s;
    s.source = pdc_state(opts.pdc);
    s.after_beam_splitter = beam_splitter(s.source, opts.ports, pipeline_beam_splitter(opts));
    return s;
}

struct PipelineResult {
    SourceStages stages;
    std::array<ConditionalState, 4> conditionals;
    DensityMatrix rho;
};

/// Full chain; throws "no coincidence support" when the order is too low.
inline PipelineResult run_pipeline(const PipelineOptions& opts) {
    PipelineResult r;
    r.stages = run_optics(opts);
    r.conditionals = all_conditionals(r.stages.after_beam_splitter, opts.projection);
    r.rho = mixture(r.conditionals);
    return r;
}

}  // namespace swapsim

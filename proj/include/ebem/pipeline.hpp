#pragma once

#include "ebem/config.hpp"
#include "ebem/post.hpp"
#include "ebem/solver.hpp"

namespace ebem {

struct SolveArtifacts {
  Model model;
  InterfaceLinks links;
  Solution solution;
  nlohmann::json report;
};

// Full pipeline: build, link, assemble, solve, summarize. Aborts with
// Error(Geometry) before assembly when interface linking reports issues.
SolveArtifacts run_solve(const RunConfig& cfg);

// Dry run: build and link only. Linking findings are data here, not errors;
// the returned diagnostics carry per-mesh quality and every issue.
nlohmann::json run_validate(const RunConfig& cfg);

// Write the report (always) plus any optional artifacts requested by
// cfg.outputs into dir, which is created if missing. Adds a timestamp field
// to the stored report; the in-memory report stays timestamp-free.
void write_outputs(const SolveArtifacts& art, const RunConfig& cfg,
                   const std::string& dir);

}  // namespace ebem

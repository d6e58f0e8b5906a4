#pragma once

#include "conepath/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace conepath {

struct RunOptions {
    std::string out_dir;                 // created if missing
    std::optional<std::uint64_t> seed;   // overrides the scenario seed
    std::optional<double> step;          // overrides integrator.step
    double tol_scale = 1.0;              // loosens (> 1) or tightens (< 1) every gate
};

/// One tolerance gate. Unasserted checks are recorded but never fail a run.
struct CheckResult {
    std::string task;
    std::string name;
    double value = 0.0;
    std::string relation;  // "<=", ">=", "<", ">", "=="
    double bound = 0.0;
    bool asserted = true;
    bool pass = true;
    std::string note;
};

struct RunResult {
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts;  // file names inside out_dir
    std::vector<std::string> skipped;    // "task: reason"

    bool pass() const;
    /// 0 when every asserted gate passes, 1 otherwise.
    int exit_code() const { return pass() ? 0 : 1; }
};

/// Runs the scenario's tasks and writes their artifacts. Throws DomainError
/// when the metric data is inadmissible; task-level numerical failures are
/// recorded as failing checks.
RunResult run_scenario(const Scenario& scenario, const RunOptions& opts, std::ostream& log);

/// Plot-ready CSVs under <artifact_dir>/plot/. Returns the files written;
/// throws std::runtime_error when the directory holds no known artifact.
std::vector<std::string> export_plotdata(const std::string& artifact_dir);

/// Default output root: $CONEPATH_OUT if set, else "conepath_out".
std::string default_output_root();

}  // namespace conepath

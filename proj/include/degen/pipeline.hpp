#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "degen/report.hpp"
#include "degen/scenario.hpp"

namespace degen {

struct RunOptions {
    std::optional<std::filesystem::path> out_dir;  // artifacts are skipped when unset
    std::optional<std::uint64_t> seed;             // overrides the scenario seed
    int threads = 1;
    Tolerances tol;
};

struct RunOutcome {
    Json report;
    bool passed = true;  // every assertion held
};

/// Runs the requested analyses in dependency order, classification first.
/// Analysis failures are recorded per analysis; they do not stop the run.
RunOutcome run(const Scenario& sc, const RunOptions& opt);

/// Classification only.
RunOutcome classify_only(const Scenario& sc, const RunOptions& opt);

struct SweepRow {
    double delta_left = 0.0;
    double delta_right = 0.0;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::string kase;
    int deficiency_index = -1;
    bool unique_submarkovian = false;
    std::optional<double> leak;
    double lambda1 = 0.0;
    int lambda1_sign = 0;  // −1, 0 or +1 with a 1e−8 dead band
    std::string status = "ok";
    std::string error;
};

/// Evaluates the grid of the scenario's sweep block over `threads` workers;
/// rows come back in grid order.
std::vector<SweepRow> sweep(const Scenario& sc, const RunOptions& opt);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

/// Writes the assembled operator of the scenario in coordinate format.
void dump_matrix(const Scenario& sc, std::ostream& os);

}  // namespace degen

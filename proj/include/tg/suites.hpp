// Batch verification harness: named suites of randomized residual checks with
// deterministic seeded sampling and machine-readable reports, level-set
// point-cloud export for the catalogued Toda solutions, the fixed convention
// ledger, and the command-line entry point.

#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>

#include "tg/catalog.hpp"

namespace tg {

struct SuiteSpec {
    std::string name;
    int samples = 200;
    std::uint64_t seed = 7;
    // Per-check tolerance overrides, keyed by check id (or prefix up to a
    // '/'); the key "*" overrides every threshold.
    std::map<std::string, double> tol;
    // Optional sampling-box override, intersected with the suite's own region
    // where one exists (currently the toda-catalog suite).
    std::optional<std::vector<std::pair<double, double>>> box;
};

struct CheckRecord {
    std::string id;
    Point point;                    // empty for aggregate checks
    std::vector<double> residuals;  // interpretations documented per suite
    double threshold = 0;
    bool detect = false;  // true: a control that must EXCEED the threshold
    bool pass = false;
    long resamples = 0;
};

struct Report {
    std::string suite;
    std::uint64_t seed = 0;
    int samples = 0;
    int jet_order = kMaxOrder;
    std::vector<CheckRecord> checks;
    // summary
    double max_residual = 0;  // over non-control checks
    double pass_rate = 1.0;
    bool all_pass = true;
};

// Registered suite names, in registry order.
const std::vector<std::string>& suite_names();
// Runs a registered suite; deterministic given the seed. Throws SuiteError
// ("unknown suite: ...") for unregistered names; guard exhaustion from
// sampling propagates as FieldError.
Report run_suite(const SuiteSpec& spec);

std::string report_json(const Report& rep);
std::string report_text(const Report& rep);

struct LevelsetReport {
    std::string entry;
    double u0 = 0;
    int grid = 0;
    long scanned = 0;                            // grid segments examined
    std::vector<std::array<double, 4>> points;  // (X, Y, Z, U) rows
    bool empty() const { return points.empty(); }
};

// Marches the grid^3 lattice over the entry's box along all three axes,
// bisecting + Newton-polishing each bracketed crossing of U = u0; emitted
// points satisfy |U - u0| <= 1e-6 (in practice near machine precision).
// An empty level set is reported, not an error.
LevelsetReport export_levelset(const std::string& entry, double u0, int grid = 12);
void write_levelset_csv(const LevelsetReport& r, std::ostream& os);
void write_levelset_obj(const LevelsetReport& r, std::ostream& os);

// The fixed sign/orientation/normalization ledger.
std::string conventions_text();

// Command-line driver (subcommands: run, export-levelset, conventions).
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage/config error.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

struct SuiteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tg

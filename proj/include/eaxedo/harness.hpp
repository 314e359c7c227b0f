#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eaxedo/algorithms.hpp"
#include "eaxedo/diversity.hpp"
#include "eaxedo/instance.hpp"
#include "eaxedo/tour.hpp"

#include <json.hpp>

namespace eaxedo {

/// Bad user input (config, dump, missing files). Maps to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- CSV -------------------------------------------------------------------

/// Comment lines (without the leading "# "), header and rows of a plain CSV
/// file. Fields never contain commas or quotes.
struct CsvTable {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
void write_csv(std::ostream& out, const CsvTable& t);
CsvTable read_csv(std::istream& in);
/// Shortest round-trip decimal form.
std::string format_double(double x);

inline constexpr const char* kSeriesSchema = "eaxedo.series/1";
inline constexpr const char* kSummarySchema = "eaxedo.summary/1";
inline constexpr const char* kOverlaySchema = "eaxedo.overlay/1";
inline constexpr const char* kRobustnessSchema = "eaxedo.robustness/1";

// ---- population dumps ------------------------------------------------------

/// A population as read back from disk.
struct PopulationDump {
    std::string instance_name;
    std::string instance_path;
    std::size_t mu = 0;
    std::vector<Tour> tours;
};

nlohmann::json tour_to_json(const Tour& t, const TspInstance& inst);
Tour tour_from_json(const nlohmann::json& j, const TspInstance& inst);

/// Instance, mu, tours (TSPLIB ids, cost) and H, ED, PD.
nlohmann::json population_to_json(std::span<const Tour> tours, std::size_t mu, const TspInstance& inst,
                                   const std::string& instance_path);
/// Parses a dump. Tours are validated against `inst` and costs recomputed.
/// Throws InputError on malformed content.
PopulationDump population_from_json(const nlohmann::json& j, const TspInstance& inst);
/// Instance path recorded in a dump ("" when absent).
std::string dump_instance_path(const nlohmann::json& j);

// ---- measures --------------------------------------------------------------

struct Measures {
    double entropy = 0.0;
    double delta_entropy = 0.0;
    /// delta_entropy / (H_upper - H_min), H_upper = ln(2 min(n mu, n(n-1)/2)).
    double normalised_entropy = 0.0;
    std::int64_t edge_diversity = 0;
    double pairwise_diversity = 0.0;
    Weight best_cost = 0;
    std::size_t unique_edges = 0;
};

double entropy_upper_bound(std::size_t n, std::size_t mu);
/// Everything recomputed from the tours.
Measures measure(std::span<const Tour> tours, std::size_t n);
nlohmann::json to_json(const Measures& m);

// ---- overlay ---------------------------------------------------------------

/// Rows (u_id, v_id, f) for every used edge, sorted; unique-edge count in a
/// comment line.
CsvTable export_edge_overlay(const Population& pop, const TspInstance& inst);

// ---- robustness ------------------------------------------------------------

struct RobustnessRow {
    std::size_t removals = 0;
    std::size_t trials = 0;
    double a = 0.0;  // percent of trials with at least one avoiding tour
    double d = 0.0;  // mean number of avoiding tours
};

/// Each trial removes `removals` distinct random edges of `opt` and counts the
/// tours avoiding all of them. Trial t draws from its own stream seeded by
/// (seed, t), so the result does not depend on the thread count.
RobustnessRow robustness_eval(std::span<const Tour> pop, const Tour& opt, std::size_t removals,
                              std::size_t trials, std::uint64_t seed);
CsvTable robustness_table(const std::vector<RobustnessRow>& rows, const std::string& label);

namespace reference {
RobustnessRow robustness_eval(std::span<const Tour> pop, const Tour& opt, std::size_t removals,
                              std::size_t trials, std::uint64_t seed);
}

// ---- experiments -----------------------------------------------------------

struct ExperimentSpec {
    std::vector<std::string> instances;
    /// Optimal tour per instance; "" = look for <stem>.opt.tour beside it.
    std::vector<std::string> optima;
    Algorithm algorithm = Algorithm::SingleStage;
    std::vector<std::size_t> mu{50};
    std::vector<double> alpha{0.1};
    std::vector<Fitness> fitness{Fitness::Entropy};
    std::vector<Operator> operators{Operator::EaxEdo};
    std::vector<ParentSelection> selection{ParentSelection::Random};
    std::size_t replications = 1;
    std::uint64_t master_seed = 1;
    std::string output_dir = "results";
    /// Scalars shared by every cell (mu, alpha, fitness, op, selection and
    /// seed are overwritten per cell).
    RunConfig base;
    /// 0 = OpenMP default.
    int threads = 0;
    bool write_populations = true;

    /// Throws InputError.
    void validate() const;
    std::size_t grid_size() const;
};

/// key = value lines, '#' comments, comma-separated lists. Relative paths are
/// resolved against `base_dir`. Throws InputError on unknown keys or values.
ExperimentSpec parse_spec(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentSpec load_spec(const std::filesystem::path& path);

struct CellInfo {
    std::size_t instance = 0;
    std::string instance_name;
    std::string instance_path;
    RunConfig cfg;
    std::size_t replication = 0;
    std::string stem;
};

/// Grid cells x replications in deterministic order with derived seeds.
std::vector<CellInfo> enumerate_cells(const ExperimentSpec& spec, const std::vector<std::string>& names);

nlohmann::json run_result_to_json(const RunResult& r, const CellInfo& cell, Algorithm alg,
                                  const TspInstance& inst);
CsvTable series_table(const RunResult& r);

struct ExperimentOutcome {
    std::vector<std::filesystem::path> result_files;
    std::filesystem::path summary;
};

/// Runs every cell (in parallel), writes <stem>.json and <stem>.csv per cell
/// and summary.csv. Throws InputError for unreadable inputs or an unwritable
/// output directory.
ExperimentOutcome run_experiments(const ExperimentSpec& spec);

/// Loads an instance; sets known_opt from the optimal tour when one is given
/// or found beside the instance. opt_path "-" skips the optimum entirely.
struct LoadedInstance {
    TspInstance inst;
    std::optional<Tour> opt;
};
LoadedInstance load_instance_with_optimum(const std::string& path, const std::string& opt_path = "");

}  // namespace eaxedo

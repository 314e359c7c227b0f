#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eaxedo/crossover.hpp"
#include "eaxedo/diversity.hpp"
#include "eaxedo/instance.hpp"
#include "eaxedo/tour.hpp"

namespace eaxedo {

enum class Fitness { Entropy, EdgeDiversity, PairwiseDiversity };
enum class Operator { EaxEdo, Eax1ab, TwoOpt };
enum class ParentSelection { Random, Quality, Diversity };
enum class Algorithm { DiversityMaximising, TwoStage, SingleStage, CostMinimising };

std::string to_string(Fitness f);
std::string to_string(Operator o);
std::string to_string(ParentSelection s);
std::string to_string(Algorithm a);
/// Inverse of to_string; throws std::invalid_argument on unknown names.
Fitness parse_fitness(const std::string& s);
Operator parse_operator(const std::string& s);
ParentSelection parse_parent_selection(const std::string& s);
Algorithm parse_algorithm(const std::string& s);

struct TwoStageParams {
    double X = 0.0614;
    double x_c = 0.4888;
    double m = 0.2413;

    /// Main-loop repetitions allowed without improvement: round(m / X).
    std::size_t failure_limit() const;
};

struct RunConfig {
    std::size_t mu = 50;
    double alpha = 0.1;
    std::uint64_t budget = 100000;
    std::uint64_t bootstrap_evals = 1000;
    Fitness fitness = Fitness::Entropy;
    Operator op = Operator::EaxEdo;
    ParentSelection parent_selection = ParentSelection::Random;
    /// Single-stage failure limit in iterations; 0 selects
    /// single_stage_failure_fraction of the iteration budget.
    std::uint64_t M_failures = 0;
    double single_stage_failure_fraction = 0.1;
    double k_elite_pct = 10.0;
    TwoStageParams two_stage;
    std::uint64_t seed = 1;

    std::size_t nn_k = 10;
    /// Search-B neighbour restriction; 0 = unrestricted up to
    /// search_b_full_limit nodes, nn_k beyond.
    std::size_t search_b_neighbors = 0;
    std::size_t search_b_full_limit = 2000;
    /// Evaluations charged per single-stage iteration (1 or 2).
    unsigned pair_charge = 2;
    /// 0 = budget / 100.
    std::uint64_t checkpoint_every = 0;
    std::size_t two_opt_passes = 50;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
    std::uint64_t checkpoint_interval() const;
    SearchBOptions search_b_options(const NearestNeighborLists& nn) const;
};

struct Checkpoint {
    std::uint64_t evaluations = 0;
    Weight best_cost = 0;
    double entropy = 0.0;
    std::int64_t edge_diversity = 0;
    double pairwise_diversity = 0.0;
};

struct RunCounters {
    std::uint64_t offspring = 0;
    std::uint64_t accepted = 0;
    std::uint64_t infeasible = 0;
    std::uint64_t identical_parents = 0;
};

struct RunResult {
    std::vector<Tour> population;
    std::size_t mu = 0;
    std::vector<Checkpoint> series;
    Tour best;
    std::uint64_t evaluations = 0;
    std::string termination;
    RunCounters counters;
};

/// Evaluation budget, checkpointing and shared read-only state of one run.
class RunContext {
public:
    RunContext(const TspInstance& inst, const NearestNeighborLists& nn, const RunConfig& cfg);

    const TspInstance& inst;
    const NearestNeighborLists& nn;
    const RunConfig& cfg;
    Rng rng;
    SearchBOptions search_b;
    RunCounters counters;

    std::uint64_t evaluations() const { return evals_; }
    std::uint64_t remaining() const { return cfg.budget - evals_; }
    /// Charges `n` evaluations and records any checkpoint boundary crossed.
    void charge(std::uint64_t n, const Population& pop);
    /// Records a checkpoint at the current count unless one exists there.
    void checkpoint(const Population& pop);
    const std::vector<Checkpoint>& series() const { return series_; }

    /// Best tour seen in any population of this run.
    const std::optional<Tour>& best() const { return best_; }
    void offer_best(const Tour& t);

    /// Called after every accepted insertion or replacement (instrumentation).
    std::function<void(const Population&)> on_step;

private:
    std::uint64_t evals_ = 0;
    std::uint64_t next_checkpoint_ = 0;
    std::vector<Checkpoint> series_;
    std::optional<Tour> best_;
};

Checkpoint measure_checkpoint(const Population& pop, std::uint64_t evaluations);

/// Two distinct member indices.
std::pair<std::size_t, std::size_t> select_parents(const Population& pop, ParentSelection strategy,
                                                   Rng& rng);

/// floor((1+alpha) * opt).
Weight quality_threshold(Weight opt, double alpha);

/// Alg. 2 for `evals` evaluations (capped by the run budget). With
/// `bootstrap_until` > 0, offspring come from 2-opt edits of a random member
/// while the run's count is below that value.
void diversity_maximising_ea(Population& pop, Weight c_max, RunContext& ctx, std::uint64_t evals,
                             std::uint64_t bootstrap_until = 0);
/// Alg. 4 for `evals` evaluations.
void cost_minimising_ea(Population& pop, RunContext& ctx, std::uint64_t evals);

/// Known-optimum run: mu copies of `opt`, then Alg. 2 for the full budget.
RunResult run_known_optimum(const TspInstance& inst, const NearestNeighborLists& nn, const Tour& opt,
                            const RunConfig& cfg);
RunResult two_stage(Population initial, const TspInstance& inst, const NearestNeighborLists& nn,
                    const RunConfig& cfg);
RunResult single_stage(Population initial, const TspInstance& inst, const NearestNeighborLists& nn,
                       const RunConfig& cfg);
/// Alg. 4 for the full budget (the EAX baseline).
RunResult cost_minimising_run(Population initial, const TspInstance& inst,
                              const NearestNeighborLists& nn, const RunConfig& cfg);

/// Builds the starting population for `alg` and runs it. Known-optimum runs
/// need `opt`; the others start from bootstrap_two_opt.
RunResult run_algorithm(Algorithm alg, const TspInstance& inst, const NearestNeighborLists& nn,
                        const RunConfig& cfg, const std::optional<Tour>& opt = std::nullopt);

/// mu copies of `opt`. Throws std::invalid_argument when the instance declares
/// a different optimum.
Population bootstrap_known_optimum(const TspInstance& inst, const Tour& opt, std::size_t mu);
/// mu random tours, each improved by first-improvement 2-opt.
Population bootstrap_two_opt(const TspInstance& inst, std::size_t mu, Rng& rng, std::size_t passes);

/// Seed stream for the initial population, separate from the search stream.
Rng bootstrap_rng(std::uint64_t seed);

}  // namespace eaxedo

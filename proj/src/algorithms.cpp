#include "eaxedo/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eaxedo {

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const std::pair<const char*, E> (&table)[N], const char* what) {
    for (const auto& [name, value] : table) {
        if (s == name) return value;
    }
    throw std::invalid_argument(std::string("unknown ") + what + " '" + s + "'");
}

constexpr std::pair<const char*, Fitness> kFitness[] = {
    {"entropy", Fitness::Entropy}, {"ED", Fitness::EdgeDiversity}, {"PD", Fitness::PairwiseDiversity}};
constexpr std::pair<const char*, Operator> kOperator[] = {
    {"EAX_EDO", Operator::EaxEdo}, {"EAX_1AB", Operator::Eax1ab}, {"TWO_OPT", Operator::TwoOpt}};
constexpr std::pair<const char*, ParentSelection> kSelection[] = {{"random", ParentSelection::Random},
                                                                    {"quality", ParentSelection::Quality},
                                                                    {"diversity", ParentSelection::Diversity}};
constexpr std::pair<const char*, Algorithm> kAlgorithm[] = {{"alg2", Algorithm::DiversityMaximising},
                                                              {"alg3", Algorithm::TwoStage},
                                                              {"alg5", Algorithm::SingleStage},
                                                              {"alg4-baseline", Algorithm::CostMinimising}};

template <typename E, std::size_t N>
std::string name_of(E v, const std::pair<const char*, E> (&table)[N]) {
    for (const auto& [name, value] : table) {
        if (v == value) return name;
    }
    return "?";
}

}  // namespace

std::string to_string(Fitness f) { return name_of(f, kFitness); }
std::string to_string(Operator o) { return name_of(o, kOperator); }
std::string to_string(ParentSelection s) { return name_of(s, kSelection); }
std::string to_string(Algorithm a) { return name_of(a, kAlgorithm); }
Fitness parse_fitness(const std::string& s) { return parse_enum(s, kFitness, "fitness"); }
Operator parse_operator(const std::string& s) { return parse_enum(s, kOperator, "operator"); }
ParentSelection parse_parent_selection(const std::string& s) {
    return parse_enum(s, kSelection, "parent selection");
}
Algorithm parse_algorithm(const std::string& s) { return parse_enum(s, kAlgorithm, "algorithm"); }

std::size_t TwoStageParams::failure_limit() const {
    return static_cast<std::size_t>(std::lround(m / X));
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (mu < 2) fail("mu must be >= 2");
    if (!(alpha >= 0.0)) fail("alpha must be >= 0");
    if (budget <= bootstrap_evals) fail("budget must exceed bootstrap_evals");
    if (!(two_stage.X > 0.0 && two_stage.X < 1.0)) fail("X must lie in (0, 1)");
    if (!(two_stage.x_c > 0.0 && two_stage.x_c < 1.0)) fail("x_c must lie in (0, 1)");
    if (!(two_stage.m > 0.0 && two_stage.m < 1.0)) fail("m must lie in (0, 1)");
    if (!(k_elite_pct >= 0.0 && k_elite_pct <= 100.0)) fail("k_elite_pct must lie in [0, 100]");
    if (!(single_stage_failure_fraction > 0.0)) fail("single_stage_failure_fraction must be > 0");
    if (pair_charge != 1 && pair_charge != 2) fail("pair_charge must be 1 or 2");
    if (nn_k < 1) fail("nn_k must be >= 1");
}

std::uint64_t RunConfig::checkpoint_interval() const {
    if (checkpoint_every > 0) return checkpoint_every;
    return std::max<std::uint64_t>(1, budget / 100);
}

SearchBOptions RunConfig::search_b_options(const NearestNeighborLists& nn) const {
    SearchBOptions o;
    o.nn = &nn;
    if (search_b_neighbors > 0) {
        o.neighbors = search_b_neighbors;
    } else if (nn.node_count() > search_b_full_limit) {
        o.neighbors = nn_k;
    }
    return o;
}

// ---- run context -----------------------------------------------------------

RunContext::RunContext(const TspInstance& inst_, const NearestNeighborLists& nn_, const RunConfig& cfg_)
    : inst(inst_), nn(nn_), cfg(cfg_), rng(mix_seed(cfg_.seed)), search_b(cfg_.search_b_options(nn_)) {}

Checkpoint measure_checkpoint(const Population& pop, std::uint64_t evaluations) {
    Checkpoint c;
    c.evaluations = evaluations;
    c.best_cost = pop.cost(pop.best_index());
    c.entropy = pop.entropy();
    c.edge_diversity = edge_diversity(pop);
    c.pairwise_diversity = pop.size() >= 2 ? pairwise_diversity(pop) : 0.0;
    return c;
}

void RunContext::charge(std::uint64_t n, const Population& pop) {
    evals_ += n;
    if (evals_ >= next_checkpoint_) checkpoint(pop);
}

void RunContext::checkpoint(const Population& pop) {
    if (!series_.empty() && series_.back().evaluations == evals_) return;
    series_.push_back(measure_checkpoint(pop, evals_));
    const std::uint64_t every = cfg.checkpoint_interval();
    next_checkpoint_ = (evals_ / every + 1) * every;
}

void RunContext::offer_best(const Tour& t) {
    if (!best_ || t.cost() < best_->cost()) best_ = t;
}

// ---- selection -------------------------------------------------------------

std::pair<std::size_t, std::size_t> select_parents(const Population& pop, ParentSelection strategy, Rng& rng) {
    const std::size_t m = pop.size();
    if (m < 2) throw std::invalid_argument("parent selection needs two members");
    if (strategy == ParentSelection::Random) {
        const std::size_t i = uniform_below(rng, m);
        std::size_t j = uniform_below(rng, m - 1);
        if (j >= i) ++j;
        return {i, j};
    }
    // Binary tournament; the winner is the lower cost or the larger entropy loss.
    auto tournament = [&]() {
        const std::size_t x = uniform_below(rng, m);
        const std::size_t y = uniform_below(rng, m);
        if (strategy == ParentSelection::Quality) {
            return pop.cost(y) < pop.cost(x) ? y : x;
        }
        return pop.removal_delta(y) < pop.removal_delta(x) ? y : x;
    };
    const std::size_t i = tournament();
    std::size_t j = tournament();
    while (j == i) j = tournament();
    return {i, j};
}

Weight quality_threshold(Weight opt, double alpha) {
    return static_cast<Weight>(std::floor((1.0 + alpha) * static_cast<double>(opt) + 1e-9));
}

// ---- Alg. 2 / Alg. 4 -------------------------------------------------------

namespace {

std::size_t worst_for(const Population& pop, Fitness f) {
    switch (f) {
        case Fitness::Entropy:
            return worst_for_entropy(pop, {});
        case Fitness::EdgeDiversity:
            return worst_for_edge_diversity(pop, {});
        case Fitness::PairwiseDiversity:
            return worst_for_pairwise_diversity(pop, {});
    }
    throw std::logic_error("bad fitness");
}

void notify(RunContext& ctx, const Population& pop) {
    if (ctx.on_step) ctx.on_step(pop);
}

}  // namespace

void diversity_maximising_ea(Population& pop, Weight c_max, RunContext& ctx, std::uint64_t evals,
                             std::uint64_t bootstrap_until) {
    const std::uint64_t stop = ctx.evaluations() + std::min(evals, ctx.remaining());
    const EntropyContext ectx{&pop.freq(), pop.total_directed()};
    while (ctx.evaluations() < stop) {
        std::optional<Tour> child;
        if (ctx.cfg.op == Operator::TwoOpt || ctx.evaluations() < bootstrap_until) {
            const std::size_t i = uniform_below(ctx.rng, pop.size());
            child = two_opt_move(pop[i], ctx.inst, ctx.rng);
        } else {
            const auto [i, j] = select_parents(pop, ctx.cfg.parent_selection, ctx.rng);
            if (same_edges(pop[i], pop[j])) {
                // No AB-cycle exists; mutate instead.
                ++ctx.counters.identical_parents;
                child = two_opt_move(pop[i], ctx.inst, ctx.rng);
            } else if (ctx.cfg.op == Operator::EaxEdo) {
                child = eax_edo(pop[i], pop[j], ectx, c_max, ctx.nn, ctx.inst, ctx.rng, ctx.search_b);
            } else {
                child = eax_1ab(pop[i], pop[j], ctx.nn, ctx.inst, ctx.rng);
            }
        }
        ++ctx.counters.offspring;
        if (child && child->cost() <= c_max) {
            ctx.offer_best(*child);
            pop.insert(std::move(*child));
            pop.remove(worst_for(pop, ctx.cfg.fitness));
            ++ctx.counters.accepted;
            notify(ctx, pop);
        } else {
            ++ctx.counters.infeasible;
        }
        ctx.charge(1, pop);
    }
}

void cost_minimising_ea(Population& pop, RunContext& ctx, std::uint64_t evals) {
    const std::uint64_t stop = ctx.evaluations() + std::min(evals, ctx.remaining());
    while (ctx.evaluations() < stop) {
        const auto [i, j] = select_parents(pop, ParentSelection::Random, ctx.rng);
        if (same_edges(pop[i], pop[j])) {
            ++ctx.counters.identical_parents;
            ctx.charge(1, pop);
            continue;
        }
        Tour child = eax_1ab(pop[i], pop[j], ctx.nn, ctx.inst, ctx.rng);
        ++ctx.counters.offspring;
        if (child.cost() <= pop.cost(i)) {
            ctx.offer_best(child);
            pop.replace(i, std::move(child));
            ++ctx.counters.accepted;
            notify(ctx, pop);
        }
        ctx.charge(1, pop);
    }
}

// ---- runs ------------------------------------------------------------------

namespace {

RunResult finish(Population& pop, RunContext& ctx, std::string reason) {
    ctx.checkpoint(pop);
    for (const Tour& t : pop.tours()) ctx.offer_best(t);
    RunResult r;
    r.mu = pop.mu();
    r.population.assign(pop.tours().begin(), pop.tours().end());
    r.series = ctx.series();
    r.best = *ctx.best();
    r.evaluations = ctx.evaluations();
    r.termination = std::move(reason);
    r.counters = ctx.counters;
    return r;
}

void start(Population& pop, RunContext& ctx) {
    for (const Tour& t : pop.tours()) ctx.offer_best(t);
    ctx.checkpoint(pop);
}

}  // namespace

RunResult run_known_optimum(const TspInstance& inst, const NearestNeighborLists& nn, const Tour& opt,
                            const RunConfig& cfg) {
    cfg.validate();
    Population pop = bootstrap_known_optimum(inst, opt, cfg.mu);
    RunContext ctx(inst, nn, cfg);
    start(pop, ctx);
    const Weight c_max = quality_threshold(opt.cost(), cfg.alpha);
    diversity_maximising_ea(pop, c_max, ctx, cfg.budget, cfg.bootstrap_evals);
    return finish(pop, ctx, "budget");
}

RunResult cost_minimising_run(Population pop, const TspInstance& inst, const NearestNeighborLists& nn,
                              const RunConfig& cfg) {
    cfg.validate();
    RunContext ctx(inst, nn, cfg);
    start(pop, ctx);
    cost_minimising_ea(pop, ctx, cfg.budget);
    return finish(pop, ctx, "budget");
}

RunResult two_stage(Population pop, const TspInstance& inst, const NearestNeighborLists& nn,
                    const RunConfig& cfg) {
    cfg.validate();
    RunConfig div_cfg = cfg;
    div_cfg.fitness = Fitness::Entropy;
    div_cfg.op = Operator::EaxEdo;
    RunContext ctx(inst, nn, div_cfg);
    start(pop, ctx);

    const auto& p = cfg.two_stage;
    const double rep = p.X * static_cast<double>(cfg.budget);
    const auto cost_evals = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(rep * p.x_c)));
    const auto div_evals =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(rep * (1.0 - p.x_c))));
    const std::size_t M = p.failure_limit();

    Weight best = pop.cost(pop.best_index());
    Weight c_max = pop.max_cost();
    std::size_t q = 0;
    while (ctx.remaining() > 0) {
        if (q < M) {
            cost_minimising_ea(pop, ctx, cost_evals);
            c_max = pop.max_cost();
        }
        const Weight now = pop.cost(pop.best_index());
        if (now < best) {
            best = now;
            q = 0;
        } else {
            ++q;
        }
        diversity_maximising_ea(pop, c_max, ctx, div_evals);
    }
    return finish(pop, ctx, "budget");
}

RunResult single_stage(Population pop, const TspInstance& inst, const NearestNeighborLists& nn,
                       const RunConfig& cfg) {
    cfg.validate();
    RunContext ctx(inst, nn, cfg);
    start(pop, ctx);

    const std::uint64_t charge = cfg.pair_charge;
    const std::uint64_t M =
        cfg.M_failures > 0
            ? cfg.M_failures
            : std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(
                                             cfg.single_stage_failure_fraction *
                                             static_cast<double>(cfg.budget / charge))));
    Weight best = pop.cost(pop.best_index());
    Weight c_max = pop.max_cost();
    std::uint64_t q = 0;

    while (ctx.remaining() >= charge) {
        const auto [i, j] = select_parents(pop, cfg.parent_selection, ctx.rng);
        if (same_edges(pop[i], pop[j])) {
            ++ctx.counters.identical_parents;
            ++q;
            ctx.charge(charge, pop);
            continue;
        }
        const EntropyContext ectx{&pop.freq(), pop.total_directed()};
        OffspringPair kids = eax_pair(pop[i], pop[j], ectx, c_max, ctx.nn, ctx.inst, ctx.rng, ctx.search_b);
        ctx.counters.offspring += 2;
        const Weight c3 = kids.cost_child.cost();
        if (c3 < best) {
            best = c3;
            ctx.offer_best(kids.cost_child);
            pop.replace(i, std::move(kids.cost_child));
            q = 0;
            ++ctx.counters.accepted;
            notify(ctx, pop);
        } else if (c3 < pop.cost(i) && q < M) {
            pop.replace(i, std::move(kids.cost_child));
            ++q;
            ++ctx.counters.accepted;
            notify(ctx, pop);
        } else if (kids.diverse_child && kids.diverse_child->cost() <= c_max) {
            pop.insert(std::move(*kids.diverse_child));
            std::vector<std::size_t> keep;
            if (q < M) {
                keep = pop.elite(cfg.k_elite_pct);
            } else {
                keep.push_back(pop.best_index());
            }
            pop.remove(worst_for_entropy(pop, keep));
            c_max = pop.max_cost();
            ++q;
            ++ctx.counters.accepted;
            notify(ctx, pop);
        } else {
            ++ctx.counters.infeasible;
            ++q;
        }
        ctx.charge(charge, pop);
    }
    return finish(pop, ctx, "budget");
}

RunResult run_algorithm(Algorithm alg, const TspInstance& inst, const NearestNeighborLists& nn,
                        const RunConfig& cfg, const std::optional<Tour>& opt) {
    if (alg == Algorithm::DiversityMaximising) {
        if (!opt) throw std::invalid_argument("known-optimum run needs an optimal tour");
        return run_known_optimum(inst, nn, *opt, cfg);
    }
    cfg.validate();
    Rng init = bootstrap_rng(cfg.seed);
    Population pop = bootstrap_two_opt(inst, cfg.mu, init, cfg.two_opt_passes);
    switch (alg) {
        case Algorithm::TwoStage:
            return two_stage(std::move(pop), inst, nn, cfg);
        case Algorithm::SingleStage:
            return single_stage(std::move(pop), inst, nn, cfg);
        case Algorithm::CostMinimising:
            return cost_minimising_run(std::move(pop), inst, nn, cfg);
        case Algorithm::DiversityMaximising:
            break;
    }
    throw std::logic_error("unreachable");
}

// ---- bootstraps ------------------------------------------------------------

Population bootstrap_known_optimum(const TspInstance& inst, const Tour& opt, std::size_t mu) {
    if (auto v = validate(opt, inst.size())) throw std::invalid_argument("optimal tour: " + *v);
    if (inst.known_opt() && *inst.known_opt() != opt.cost()) {
        throw std::invalid_argument("optimal tour costs " + std::to_string(opt.cost()) + ", instance declares " +
                                    std::to_string(*inst.known_opt()));
    }
    if (mu < 1) throw std::invalid_argument("mu must be >= 1");
    Population pop(inst.size(), mu);
    for (std::size_t i = 0; i < mu; ++i) pop.insert(opt);
    return pop;
}

Population bootstrap_two_opt(const TspInstance& inst, std::size_t mu, Rng& rng, std::size_t passes) {
    if (mu < 2) throw std::invalid_argument("mu must be >= 2");
    Population pop(inst.size(), mu);
    for (std::size_t i = 0; i < mu; ++i) {
        Tour t = random_tour(inst, rng);
        two_opt_local_search(t, inst, passes);
        pop.insert(std::move(t));
    }
    return pop;
}

Rng bootstrap_rng(std::uint64_t seed) { return Rng(mix_seed(seed ^ 0x5bd1e995u)); }

}  // namespace eaxedo

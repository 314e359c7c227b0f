#include "eaxedo/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eaxedo {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- CSV -------------------------------------------------------------------

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const CsvTable& t) {
    auto line = [&out](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
        out << '\n';
    };
    for (const auto& c : t.comments) out << "# " << c << '\n';
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string raw;
    bool have_header = false;
    while (std::getline(in, raw)) {
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (!have_header && raw.rfind("# ", 0) == 0) {
            t.comments.push_back(raw.substr(2));
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = raw.find(',', start);
            fields.push_back(raw.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != t.header.size()) throw InputError("csv: row width differs from header");
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

// ---- tours and dumps -------------------------------------------------------

json tour_to_json(const Tour& t, const TspInstance& inst) {
    json order = json::array();
    for (const NodeId v : t.order()) order.push_back(inst.id_of(v));
    return json{{"cost", t.cost()}, {"order", std::move(order)}};
}

Tour tour_from_json(const json& j, const TspInstance& inst) {
    if (!j.is_object() || !j.contains("order") || !j.at("order").is_array()) {
        throw InputError("tour entry lacks an order array");
    }
    std::vector<NodeId> order;
    for (const auto& id : j.at("order")) {
        if (!id.is_number_integer()) throw InputError("tour order entries must be integers");
        const NodeId v = inst.index_of(id.get<std::int64_t>());
        if (v < 0) throw InputError("tour references unknown node id " + id.dump());
        order.push_back(v);
    }
    if (auto bad = validate(order, inst.size())) throw InputError("invalid tour: " + *bad);
    return Tour(std::move(order), inst);
}

json population_to_json(std::span<const Tour> tours, std::size_t mu, const TspInstance& inst,
                        const std::string& instance_path) {
    json arr = json::array();
    for (const Tour& t : tours) arr.push_back(tour_to_json(t, inst));
    const Measures m = measure(tours, inst.size());
    return json{{"instance", inst.name()},
                {"instance_path", instance_path},
                {"mu", mu},
                {"tours", std::move(arr)},
                {"H", m.entropy},
                {"ED", m.edge_diversity},
                {"PD", m.pairwise_diversity}};
}

std::string dump_instance_path(const json& j) {
    const json& p = j.contains("population") ? j.at("population") : j;
    if (p.contains("instance_path") && p.at("instance_path").is_string()) {
        return p.at("instance_path").get<std::string>();
    }
    return {};
}

PopulationDump population_from_json(const json& j, const TspInstance& inst) {
    // Accept either a bare dump or a run result embedding one.
    const json& p = j.is_object() && j.contains("population") ? j.at("population") : j;
    if (!p.is_object() || !p.contains("tours") || !p.at("tours").is_array()) {
        throw InputError("population dump lacks a tours array");
    }
    PopulationDump d;
    d.instance_name = p.value("instance", std::string{});
    d.instance_path = p.value("instance_path", std::string{});
    for (const auto& t : p.at("tours")) d.tours.push_back(tour_from_json(t, inst));
    d.mu = p.contains("mu") && p.at("mu").is_number_unsigned() ? p.at("mu").get<std::size_t>() : d.tours.size();
    if (d.tours.empty()) throw InputError("population dump has no tours");
    if (!d.instance_name.empty() && d.instance_name != inst.name()) {
        throw InputError("dump is for instance '" + d.instance_name + "', not '" + inst.name() + "'");
    }
    return d;
}

// ---- measures --------------------------------------------------------------

double entropy_upper_bound(std::size_t n, std::size_t mu) {
    const double uses = static_cast<double>(n) * static_cast<double>(mu);
    const double edges = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return std::log(2.0 * std::min(uses, edges));
}

Measures measure(std::span<const Tour> tours, std::size_t n) {
    if (tours.empty()) throw InputError("cannot measure an empty population");
    EdgeFrequencyTable freq(n);
    for (const Tour& t : tours) freq.add_tour(t, +1);
    const std::size_t mu = tours.size();
    Measures m;
    m.entropy = entropy_of(freq, 2.0 * static_cast<double>(n * mu));
    const double hmin = min_entropy(n);
    m.delta_entropy = m.entropy - hmin;
    const double span = entropy_upper_bound(n, mu) - hmin;
    m.normalised_entropy = span > 0.0 ? m.delta_entropy / span : 0.0;
    std::int64_t sum_sq = 0;
    for (const auto& [e, f] : freq.entries()) sum_sq += static_cast<std::int64_t>(f) * f;
    const auto mm = static_cast<std::int64_t>(mu);
    m.edge_diversity = 2 * static_cast<std::int64_t>(n) * mm * mm - 2 * sum_sq;
    if (mu >= 2) {
        const std::vector<int> diff = pairwise_differences(tours);
        double total = 0.0;
        for (std::size_t p = 0; p < mu; ++p) {
            int best = std::numeric_limits<int>::max();
            for (std::size_t q = 0; q < mu; ++q) {
                if (q != p) best = std::min(best, diff[p * mu + q]);
            }
            total += best;
        }
        m.pairwise_diversity = total / (static_cast<double>(n) * static_cast<double>(mu));
    }
    m.best_cost = std::min_element(tours.begin(), tours.end(), [](const Tour& a, const Tour& b) {
                      return a.cost() < b.cost();
                  })->cost();
    m.unique_edges = freq.unique_edges();
    return m;
}

json to_json(const Measures& m) {
    return json{{"H", m.entropy},
                {"delta_H", m.delta_entropy},
                {"normalised_H", m.normalised_entropy},
                {"ED", m.edge_diversity},
                {"PD", m.pairwise_diversity},
                {"best_cost", m.best_cost},
                {"unique_edges", m.unique_edges}};
}

// ---- overlay ---------------------------------------------------------------

CsvTable export_edge_overlay(const Population& pop, const TspInstance& inst) {
    CsvTable t;
    const auto entries = pop.freq().entries();
    t.comments = {std::string("schema ") + kOverlaySchema, "unique_edges " + std::to_string(entries.size())};
    t.header = {"u_id", "v_id", "f"};
    for (const auto& [e, f] : entries) {
        t.rows.push_back({std::to_string(inst.id_of(e.a)), std::to_string(inst.id_of(e.b)), std::to_string(f)});
    }
    return t;
}

// ---- robustness ------------------------------------------------------------

namespace {

void check_robustness_args(std::span<const Tour> pop, const Tour& opt, std::size_t removals,
                           std::size_t trials) {
    if (pop.empty()) throw std::invalid_argument("robustness: empty population");
    if (removals < 1 || removals > opt.size()) throw std::invalid_argument("robustness: bad removal count");
    if (trials < 1) throw std::invalid_argument("robustness: trials must be >= 1");
    for (const Tour& t : pop) {
        if (t.size() != opt.size()) throw std::invalid_argument("robustness: size mismatch");
    }
}

// Number of tours avoiding every edge removed in trial `trial`.
std::size_t run_trial(std::span<const Tour> pop, const std::vector<Edge>& opt_edges, std::size_t removals,
                      std::uint64_t seed, std::size_t trial, std::vector<std::size_t>& pick) {
    Rng rng(mix_seed(seed ^ mix_seed(trial)));
    // Partial Fisher-Yates over edge indices: distinct edges.
    pick.resize(opt_edges.size());
    for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
    for (std::size_t i = 0; i < removals; ++i) {
        const std::size_t j = i + uniform_below(rng, pick.size() - i);
        std::swap(pick[i], pick[j]);
    }
    std::size_t avoiding = 0;
    for (const Tour& t : pop) {
        bool ok = true;
        for (std::size_t i = 0; i < removals && ok; ++i) {
            const Edge& e = opt_edges[pick[i]];
            ok = !t.has_edge(e.a, e.b);
        }
        avoiding += ok ? 1 : 0;
    }
    return avoiding;
}

RobustnessRow summarise(std::size_t removals, std::size_t trials, std::size_t hits, std::size_t total) {
    RobustnessRow r;
    r.removals = removals;
    r.trials = trials;
    r.a = 100.0 * static_cast<double>(hits) / static_cast<double>(trials);
    r.d = static_cast<double>(total) / static_cast<double>(trials);
    return r;
}

}  // namespace

RobustnessRow robustness_eval(std::span<const Tour> pop, const Tour& opt, std::size_t removals,
                              std::size_t trials, std::uint64_t seed) {
    check_robustness_args(pop, opt, removals, trials);
    const std::vector<Edge> opt_edges = opt.edges();
    std::size_t hits = 0;
    std::size_t total = 0;
    const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel reduction(+ : hits, total)
    {
        std::vector<std::size_t> pick;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) {
            const std::size_t c = run_trial(pop, opt_edges, removals, seed, static_cast<std::size_t>(i), pick);
            hits += c > 0 ? 1 : 0;
            total += c;
        }
    }
    return summarise(removals, trials, hits, total);
}

namespace reference {
RobustnessRow robustness_eval(std::span<const Tour> pop, const Tour& opt, std::size_t removals,
                              std::size_t trials, std::uint64_t seed) {
    check_robustness_args(pop, opt, removals, trials);
    const std::vector<Edge> opt_edges = opt.edges();
    std::vector<std::size_t> pick;
    std::size_t hits = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const std::size_t c = run_trial(pop, opt_edges, removals, seed, i, pick);
        hits += c > 0 ? 1 : 0;
        total += c;
    }
    return summarise(removals, trials, hits, total);
}
}  // namespace reference

CsvTable robustness_table(const std::vector<RobustnessRow>& rows, const std::string& label) {
    CsvTable t;
    t.comments = {std::string("schema ") + kRobustnessSchema};
    t.header = {"label", "removals", "trials", "a", "d"};
    for (const auto& r : rows) {
        t.rows.push_back({label, std::to_string(r.removals), std::to_string(r.trials), format_double(r.a),
                          format_double(r.d)});
    }
    return t;
}

// ---- spec parsing ----------------------------------------------------------

void ExperimentSpec::validate() const {
    if (instances.empty()) throw InputError("spec: no instance given");
    if (!optima.empty() && optima.size() != instances.size()) {
        throw InputError("spec: optimum list must match the instance list");
    }
    if (replications < 1) throw InputError("spec: replications must be >= 1");
    if (mu.empty() || alpha.empty() || fitness.empty() || operators.empty() || selection.empty()) {
        throw InputError("spec: empty grid dimension");
    }
    RunConfig probe = base;
    for (const std::size_t m : mu) {
        for (const double a : alpha) {
            probe.mu = m;
            probe.alpha = a;
            try {
                probe.validate();
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what());
            }
        }
    }
}

std::size_t ExperimentSpec::grid_size() const {
    return instances.size() * mu.size() * alpha.size() * fitness.size() * operators.size() * selection.size();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw InputError("spec: bad value '" + v + "' for " + key);
    }
    return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& key, const std::string& v, F parse_one) {
    std::vector<T> out;
    for (const auto& item : split_list(v)) out.push_back(parse_one(key, item));
    if (out.empty()) throw InputError("spec: empty list for " + key);
    return out;
}

template <typename F>
auto wrap(F f) {
    return [f](const std::string& key, const std::string& v) {
        try {
            return f(v);
        } catch (const std::invalid_argument& e) {
            throw InputError("spec: " + key + ": " + e.what());
        }
    };
}

std::string resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) return p;
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? p : (base / path).lexically_normal().string();
}

}  // namespace

ExperimentSpec parse_spec(std::istream& in, const fs::path& base_dir) {
    ExperimentSpec s;
    RunConfig& c = s.base;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("spec line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));
        auto u64 = [&](const std::string& k, const std::string& x) { return parse_number<std::uint64_t>(k, x); };
        auto dbl = [&](const std::string& k, const std::string& x) { return parse_number<double>(k, x); };
        auto sz = [&](const std::string& k, const std::string& x) { return parse_number<std::size_t>(k, x); };

        if (key == "instance") {
            for (const auto& p : split_list(v)) s.instances.push_back(resolve(base_dir, p));
        } else if (key == "optimum") {
            s.optima.clear();
            for (const auto& p : split_list(v)) s.optima.push_back(p == "-" ? "" : resolve(base_dir, p));
        } else if (key == "algorithm") {
            s.algorithm = wrap(parse_algorithm)(key, v);
        } else if (key == "mu") {
            s.mu = parse_list<std::size_t>(key, v, sz);
        } else if (key == "alpha") {
            s.alpha = parse_list<double>(key, v, dbl);
        } else if (key == "fitness") {
            s.fitness = parse_list<Fitness>(key, v, wrap(parse_fitness));
        } else if (key == "operator") {
            s.operators = parse_list<Operator>(key, v, wrap(parse_operator));
        } else if (key == "parent_selection") {
            s.selection = parse_list<ParentSelection>(key, v, wrap(parse_parent_selection));
        } else if (key == "replications") {
            s.replications = sz(key, v);
        } else if (key == "seed") {
            s.master_seed = u64(key, v);
        } else if (key == "output_dir") {
            s.output_dir = resolve(base_dir, v);
        } else if (key == "threads") {
            s.threads = parse_number<int>(key, v);
        } else if (key == "write_populations") {
            if (v != "true" && v != "false") throw InputError("spec: write_populations must be true or false");
            s.write_populations = v == "true";
        } else if (key == "budget") {
            c.budget = u64(key, v);
        } else if (key == "bootstrap_evals") {
            c.bootstrap_evals = u64(key, v);
        } else if (key == "M_failures") {
            c.M_failures = u64(key, v);
        } else if (key == "single_stage_failure_fraction") {
            c.single_stage_failure_fraction = dbl(key, v);
        } else if (key == "k_elite_pct") {
            c.k_elite_pct = dbl(key, v);
        } else if (key == "X") {
            c.two_stage.X = dbl(key, v);
        } else if (key == "x_c") {
            c.two_stage.x_c = dbl(key, v);
        } else if (key == "m") {
            c.two_stage.m = dbl(key, v);
        } else if (key == "nn_k") {
            c.nn_k = sz(key, v);
        } else if (key == "search_b_neighbors") {
            c.search_b_neighbors = sz(key, v);
        } else if (key == "search_b_full_limit") {
            c.search_b_full_limit = sz(key, v);
        } else if (key == "pair_charge") {
            c.pair_charge = parse_number<unsigned>(key, v);
        } else if (key == "checkpoint_every") {
            c.checkpoint_every = u64(key, v);
        } else if (key == "two_opt_passes") {
            c.two_opt_passes = sz(key, v);
        } else {
            throw InputError("spec line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    s.validate();
    return s;
}

ExperimentSpec load_spec(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open spec " + path.string());
    return parse_spec(in, path.parent_path());
}

// ---- experiments -----------------------------------------------------------

LoadedInstance load_instance_with_optimum(const std::string& path, const std::string& opt_path) {
    std::optional<TspInstance> inst;
    try {
        inst.emplace(load_tsplib(path));
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw InputError(e.what());
    }
    std::string tour_path = opt_path == "-" ? "" : opt_path;
    if (opt_path.empty()) {
        fs::path guess(path);
        guess.replace_extension(".opt.tour");
        if (fs::exists(guess)) tour_path = guess.string();
    }
    std::optional<Tour> opt;
    if (!tour_path.empty()) {
        try {
            opt = load_tsplib_tour(tour_path, *inst);
        } catch (const std::exception& e) {
            throw InputError(tour_path + ": " + e.what());
        }
        inst->set_known_opt(opt->cost());
    }
    return {std::move(*inst), std::move(opt)};
}

namespace {

std::string alpha_label(double a) {
    std::string s = format_double(a);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

}  // namespace

std::vector<CellInfo> enumerate_cells(const ExperimentSpec& spec, const std::vector<std::string>& names) {
    std::vector<CellInfo> cells;
    const bool known = spec.algorithm == Algorithm::DiversityMaximising;
    for (std::size_t ii = 0; ii < spec.instances.size(); ++ii) {
        for (std::size_t mi = 0; mi < spec.mu.size(); ++mi) {
            for (std::size_t ai = 0; ai < spec.alpha.size(); ++ai) {
                for (std::size_t fi = 0; fi < spec.fitness.size(); ++fi) {
                    for (std::size_t oi = 0; oi < spec.operators.size(); ++oi) {
                        for (std::size_t si = 0; si < spec.selection.size(); ++si) {
                            for (std::size_t r = 0; r < spec.replications; ++r) {
                                CellInfo c;
                                c.instance = ii;
                                c.instance_name = names[ii];
                                c.instance_path = spec.instances[ii];
                                c.replication = r;
                                c.cfg = spec.base;
                                c.cfg.mu = spec.mu[mi];
                                c.cfg.alpha = spec.alpha[ai];
                                c.cfg.fitness = spec.fitness[fi];
                                c.cfg.op = spec.operators[oi];
                                c.cfg.parent_selection = spec.selection[si];
                                std::uint64_t seed = mix_seed(spec.master_seed);
                                for (const std::uint64_t coord : {ii, mi, ai, fi, oi, si, r}) {
                                    seed = mix_seed(seed ^ coord);
                                }
                                c.cfg.seed = seed;
                                std::string stem = names[ii] + "_" + to_string(spec.algorithm) + "_mu" +
                                                   std::to_string(c.cfg.mu);
                                if (known || spec.alpha.size() > 1) stem += "_a" + alpha_label(c.cfg.alpha);
                                if (known || spec.fitness.size() > 1) stem += "_" + to_string(c.cfg.fitness);
                                stem += "_" + to_string(c.cfg.op) + "_" + to_string(c.cfg.parent_selection) + "_r" +
                                        std::to_string(r);
                                c.stem = std::move(stem);
                                cells.push_back(std::move(c));
                            }
                        }
                    }
                }
            }
        }
    }
    return cells;
}

namespace {

json config_to_json(const RunConfig& c) {
    return json{{"mu", c.mu},
                {"alpha", c.alpha},
                {"budget", c.budget},
                {"bootstrap_evals", c.bootstrap_evals},
                {"fitness", to_string(c.fitness)},
                {"operator", to_string(c.op)},
                {"parent_selection", to_string(c.parent_selection)},
                {"M_failures", c.M_failures},
                {"single_stage_failure_fraction", c.single_stage_failure_fraction},
                {"k_elite_pct", c.k_elite_pct},
                {"X", c.two_stage.X},
                {"x_c", c.two_stage.x_c},
                {"m", c.two_stage.m},
                {"seed", c.seed},
                {"nn_k", c.nn_k},
                {"search_b_neighbors", c.search_b_neighbors},
                {"search_b_full_limit", c.search_b_full_limit},
                {"pair_charge", c.pair_charge},
                {"checkpoint_every", c.checkpoint_interval()},
                {"two_opt_passes", c.two_opt_passes}};
}

}  // namespace

json run_result_to_json(const RunResult& r, const CellInfo& cell, Algorithm alg, const TspInstance& inst) {
    json series = json::array();
    for (const auto& c : r.series) {
        series.push_back(json{{"evaluations", c.evaluations},
                              {"best_cost", c.best_cost},
                              {"H", c.entropy},
                              {"ED", c.edge_diversity},
                              {"PD", c.pairwise_diversity}});
    }
    return json{{"schema", "eaxedo.run/1"},
                {"instance", inst.name()},
                {"algorithm", to_string(alg)},
                {"replication", cell.replication},
                {"config", config_to_json(cell.cfg)},
                {"evaluations", r.evaluations},
                {"termination", r.termination},
                {"counters",
                 {{"offspring", r.counters.offspring},
                  {"accepted", r.counters.accepted},
                  {"infeasible", r.counters.infeasible},
                  {"identical_parents", r.counters.identical_parents}}},
                {"best", tour_to_json(r.best, inst)},
                {"series", std::move(series)},
                {"population", population_to_json(r.population, r.mu, inst, cell.instance_path)}};
}

CsvTable series_table(const RunResult& r) {
    CsvTable t;
    t.comments = {std::string("schema ") + kSeriesSchema};
    t.header = {"evaluations", "best_cost", "H", "ED", "PD"};
    for (const auto& c : r.series) {
        t.rows.push_back({std::to_string(c.evaluations), std::to_string(c.best_cost), format_double(c.entropy),
                          std::to_string(c.edge_diversity), format_double(c.pairwise_diversity)});
    }
    return t;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    if (!out) throw InputError("write failed for " + path.string());
}

std::string csv_string(const CsvTable& t) {
    std::ostringstream ss;
    write_csv(ss, t);
    return ss.str();
}

}  // namespace

ExperimentOutcome run_experiments(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<LoadedInstance> loaded;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < spec.instances.size(); ++i) {
        const std::string opt = spec.optima.empty() ? "" : spec.optima[i];
        loaded.push_back(load_instance_with_optimum(spec.instances[i], opt));
        if (spec.algorithm == Algorithm::DiversityMaximising && !loaded.back().opt) {
            throw InputError("known-optimum runs need an optimal tour for " + spec.instances[i]);
        }
        names.push_back(loaded.back().inst.name());
    }
    std::vector<NearestNeighborLists> nn;
    for (const auto& l : loaded) nn.push_back(build_nn_lists(l.inst, std::min(spec.base.nn_k, l.inst.size() - 1)));

    const fs::path out_dir(spec.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw InputError("cannot create output directory " + out_dir.string());

    const std::vector<CellInfo> cells = enumerate_cells(spec, names);
    std::vector<Measures> finals(cells.size());
    std::vector<Weight> bests(cells.size());
    std::vector<std::uint64_t> evals(cells.size());
    std::vector<std::string> errors(cells.size());

    const auto count = static_cast<std::int64_t>(cells.size());
    int threads = 1;
#ifdef _OPENMP
    threads = spec.threads > 0 ? spec.threads : omp_get_max_threads();
#endif
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t k = 0; k < count; ++k) {
        const CellInfo& cell = cells[static_cast<std::size_t>(k)];
        const auto& l = loaded[cell.instance];
        try {
            const RunResult r = run_algorithm(spec.algorithm, l.inst, nn[cell.instance], cell.cfg, l.opt);
            json j = run_result_to_json(r, cell, spec.algorithm, l.inst);
            if (!spec.write_populations) j.erase("population");
            write_file(out_dir / (cell.stem + ".json"), j.dump(1) + "\n");
            write_file(out_dir / (cell.stem + ".csv"), csv_string(series_table(r)));
            finals[static_cast<std::size_t>(k)] = measure(r.population, l.inst.size());
            bests[static_cast<std::size_t>(k)] = r.best.cost();
            evals[static_cast<std::size_t>(k)] = r.evaluations;
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(k)] = cell.stem + ": " + e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw InputError(e);
    }

    CsvTable summary;
    summary.comments = {std::string("schema ") + kSummarySchema};
    summary.header = {"instance", "algorithm", "mu", "alpha", "fitness", "operator", "parent_selection",
                      "replication", "seed", "evaluations", "H", "delta_H", "normalised_H", "ED", "PD",
                      "final_best_cost", "best_cost", "unique_edges"};
    ExperimentOutcome out;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const CellInfo& c = cells[k];
        const Measures& m = finals[k];
        summary.rows.push_back({c.instance_name, to_string(spec.algorithm), std::to_string(c.cfg.mu),
                                format_double(c.cfg.alpha), to_string(c.cfg.fitness), to_string(c.cfg.op),
                                to_string(c.cfg.parent_selection), std::to_string(c.replication),
                                std::to_string(c.cfg.seed), std::to_string(evals[k]), format_double(m.entropy),
                                format_double(m.delta_entropy), format_double(m.normalised_entropy),
                                std::to_string(m.edge_diversity), format_double(m.pairwise_diversity),
                                std::to_string(m.best_cost), std::to_string(bests[k]),
                                std::to_string(m.unique_edges)});
        out.result_files.push_back(out_dir / (c.stem + ".json"));
    }
    out.summary = out_dir / "summary.csv";
    write_file(out.summary, csv_string(summary));
    return out;
}

}  // namespace eaxedo

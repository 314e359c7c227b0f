// eaxedo: run experiment grids and inspect population dumps.
//
// Exit codes: 0 success, 1 usage error, 2 input error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "eaxedo/harness.hpp"

namespace {

using namespace eaxedo;
using nlohmann::json;

constexpr int kUsage = 1;
constexpr int kInput = 2;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

// Instance from --instance or the path recorded in the dump.
LoadedInstance instance_for_dump(const json& dump, const std::string& instance_flag) {
    std::string path = instance_flag;
    if (path.empty()) path = dump_instance_path(dump);
    if (path.empty()) throw InputError("dump records no instance path; pass --instance");
    return load_instance_with_optimum(path, "-");
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InputError("cannot write " + out_path);
    out << text;
}

std::string csv_text(const CsvTable& t) {
    std::ostringstream ss;
    write_csv(ss, t);
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diverse high-quality TSP tour sets via EAX-based evolutionary diversity optimisation"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run an experiment grid");
    std::string spec_path;
    std::vector<std::string> instances;
    std::vector<std::string> optima;
    std::string algorithm;
    std::vector<std::size_t> mus;
    std::vector<double> alphas;
    std::vector<std::string> fitness;
    std::vector<std::string> operators;
    std::vector<std::string> selection;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    std::uint64_t budget = 0;
    std::uint64_t m_failures = 0;
    double k_elite = 0.0;
    int threads = 0;
    std::string output_dir;
    run->add_option("--spec", spec_path, "key = value experiment file");
    run->add_option("--instance", instances, "TSPLIB .tsp files")->delimiter(',');
    run->add_option("--optimum", optima, "optimal tours, aligned with --instance ('-' = auto)")->delimiter(',');
    run->add_option("--algorithm", algorithm, "alg2 | alg3 | alg5 | alg4-baseline");
    run->add_option("--mu", mus)->delimiter(',');
    run->add_option("--alpha", alphas)->delimiter(',');
    run->add_option("--fitness", fitness, "entropy | ED | PD")->delimiter(',');
    run->add_option("--operator", operators, "EAX_EDO | EAX_1AB | TWO_OPT")->delimiter(',');
    run->add_option("--parent-selection", selection, "random | quality | diversity")->delimiter(',');
    run->add_option("--replications", replications);
    run->add_option("--seed", seed, "master seed");
    run->add_option("--budget", budget, "fitness evaluations per run");
    run->add_option("--M", m_failures, "single-stage failure limit (0 = fraction of budget)");
    run->add_option("--k-elite", k_elite, "elite percentage");
    run->add_option("--threads", threads);
    run->add_option("--output", output_dir, "output directory (EAXEDO_OUTPUT_DIR overrides)");

    // robustness
    auto* rob = app.add_subcommand("robustness", "edge-removal robustness of a population");
    std::string rob_pop;
    std::string rob_opt;
    std::string rob_inst;
    std::vector<std::size_t> removals{1, 2, 3};
    std::size_t trials = 1000;
    std::uint64_t rob_seed = 1;
    std::string rob_label = "population";
    std::string rob_out;
    rob->add_option("--population", rob_pop, "population dump or run result JSON")->required();
    rob->add_option("--optimum", rob_opt, "optimal tour (TSPLIB)")->required();
    rob->add_option("--instance", rob_inst, "instance (default: path recorded in the dump)");
    rob->add_option("--removals", removals)->delimiter(',');
    rob->add_option("--trials", trials);
    rob->add_option("--seed", rob_seed);
    rob->add_option("--label", rob_label);
    rob->add_option("--output", rob_out, "CSV file (default stdout)");

    // overlay
    auto* ov = app.add_subcommand("overlay", "edge-frequency CSV of a population");
    std::string ov_pop;
    std::string ov_inst;
    std::string ov_out;
    ov->add_option("dump", ov_pop)->required();
    ov->add_option("--instance", ov_inst);
    ov->add_option("--output", ov_out);

    // measure
    auto* me = app.add_subcommand("measure", "recompute diversity measures of a population");
    std::string me_pop;
    std::string me_inst;
    me->add_option("dump", me_pop)->required();
    me->add_option("--instance", me_inst);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        if (*run) {
            ExperimentSpec spec;
            if (!spec_path.empty()) spec = load_spec(spec_path);
            if (!instances.empty()) spec.instances = instances;
            if (!optima.empty()) {
                spec.optima.clear();
                for (const auto& o : optima) spec.optima.push_back(o == "-" ? "" : o);
            }
            try {
                if (!algorithm.empty()) spec.algorithm = parse_algorithm(algorithm);
                if (!mus.empty()) spec.mu = mus;
                if (!alphas.empty()) spec.alpha = alphas;
                if (!fitness.empty()) {
                    spec.fitness.clear();
                    for (const auto& f : fitness) spec.fitness.push_back(parse_fitness(f));
                }
                if (!operators.empty()) {
                    spec.operators.clear();
                    for (const auto& o : operators) spec.operators.push_back(parse_operator(o));
                }
                if (!selection.empty()) {
                    spec.selection.clear();
                    for (const auto& s : selection) spec.selection.push_back(parse_parent_selection(s));
                }
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kUsage;
            }
            if (run->count("--replications")) spec.replications = replications;
            if (run->count("--seed")) spec.master_seed = seed;
            if (run->count("--budget")) spec.base.budget = budget;
            if (run->count("--M")) spec.base.M_failures = m_failures;
            if (run->count("--k-elite")) spec.base.k_elite_pct = k_elite;
            if (run->count("--threads")) spec.threads = threads;
            if (!output_dir.empty()) spec.output_dir = output_dir;
            if (const char* env = std::getenv("EAXEDO_OUTPUT_DIR"); env != nullptr && *env != '\0') {
                spec.output_dir = env;
            }
            if (spec.instances.empty()) {
                std::cerr << "error: no instance given (--instance or --spec)\n";
                return kUsage;
            }
            const ExperimentOutcome out = run_experiments(spec);
            std::cout << "wrote " << out.result_files.size() << " runs; summary " << out.summary.string() << '\n';
        } else if (*rob) {
            const json dump = read_json(rob_pop);
            LoadedInstance li = instance_for_dump(dump, rob_inst);
            const PopulationDump pop = population_from_json(dump, li.inst);
            Tour opt = [&] {
                try {
                    return load_tsplib_tour(rob_opt, li.inst);
                } catch (const std::exception& e) {
                    throw InputError(rob_opt + ": " + e.what());
                }
            }();
            std::vector<RobustnessRow> rows;
            for (const std::size_t r : removals) {
                if (r < 1 || r > li.inst.size()) {
                    std::cerr << "error: removal count " << r << " out of range\n";
                    return kUsage;
                }
                if (trials < 1) {
                    std::cerr << "error: trials must be >= 1\n";
                    return kUsage;
                }
                rows.push_back(robustness_eval(pop.tours, opt, r, trials, rob_seed));
            }
            emit(rob_out, csv_text(robustness_table(rows, rob_label)));
        } else if (*ov) {
            const json dump = read_json(ov_pop);
            LoadedInstance li = instance_for_dump(dump, ov_inst);
            PopulationDump d = population_from_json(dump, li.inst);
            const Population pop(std::move(d.tours));
            emit(ov_out, csv_text(export_edge_overlay(pop, li.inst)));
        } else if (*me) {
            const json dump = read_json(me_pop);
            LoadedInstance li = instance_for_dump(dump, me_inst);
            const PopulationDump d = population_from_json(dump, li.inst);
            json out = to_json(measure(d.tours, li.inst.size()));
            out["instance"] = li.inst.name();
            out["mu"] = d.tours.size();
            std::cout << out.dump() << '\n';
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
    return 0;
}

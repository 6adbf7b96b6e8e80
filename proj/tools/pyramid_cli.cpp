// Command-line front end: instance generation, experiments, reports, oracles.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pyramid/bench.hpp"
#include "pyramid/enumerate.hpp"
#include "pyramid/partnering.hpp"

namespace fs = std::filesystem;
using namespace pyramid;

namespace {

/// Bad user input; reported with exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

bench::Family family_of(const std::string& name) {
    const auto f = bench::parse_family(name);
    if (!f) throw UsageError("unknown problem '" + name + "'; valid: nurse,mall");
    return *f;
}

bench::ReportFormat format_of(const std::string& name) {
    if (name == "table") return bench::ReportFormat::table;
    if (name == "csv") return bench::ReportFormat::csv;
    throw UsageError("unknown format '" + name + "'; valid: table,csv");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("PYRAMID_OUT")) return env;
    return "results";
}

struct GenerateArgs {
    std::string problem = "nurse";
    int instances = 10;
    std::uint64_t seed = 1;
    std::string out;
    bool tiny = false;
    int nurses = 30;
    double tightness = -1.0;
    int types = 20;
};

int cmd_generate(const GenerateArgs& a) {
    const auto family = family_of(a.problem);
    const fs::path dir = output_dir(a.out);
    for (int i = 0; i < a.instances; ++i) {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
        std::string text;
        if (family == bench::Family::nurse) {
            nurse::GeneratorParams p;
            p.nurses = a.nurses;
            if (a.tightness >= 0.0) p.tightness = a.tightness;
            text = nurse::to_text(a.tiny ? nurse::generate_tiny_instance(std::min(a.nurses, 4), seed)
                                         : nurse::generate_instance(p, seed));
        } else {
            mall::GeneratorParams p;
            p.types = a.types;
            if (a.tightness >= 0.0) p.tightness = a.tightness;
            text = mall::to_text(a.tiny ? mall::generate_tiny_mall_instance(seed) : mall::generate_mall_instance(p, seed));
        }
        char name[64];
        std::snprintf(name, sizeof name, "%s_%03d.json", a.problem.c_str(), i);
        write_file(dir / name, text);
    }
    std::cout << "wrote " << a.instances << " " << a.problem << " instances to " << dir.string() << "\n";
    return 0;
}

struct RunArgs {
    std::string config;
    std::string problem;
    std::string mating;
    std::string eval;
    std::string strategies;
    std::uint64_t seed = 0;
    int runs = 0;
    int instances = 0;
    std::vector<std::string> instance_files;
    bool hillclimb = false;
    double tightness = -1.0;
    std::string out;
    std::string format = "table";
    int threads = 0;
    double wall_clock = -1.0;
    CLI::App* app = nullptr;
};

bench::ExperimentConfig build_config(const RunArgs& a) {
    bench::ExperimentConfig c;
    if (!a.config.empty()) {
        c = bench::experiment_from_json(slurp(a.config));
        if (!a.problem.empty() && family_of(a.problem) != c.family) throw UsageError("--problem disagrees with the config file");
    } else {
        c = bench::ExperimentConfig::defaults(family_of(a.problem.empty() ? "nurse" : a.problem));
    }
    std::vector<bench::Variant> variants;
    for (const auto& label : split_list(a.strategies)) variants.push_back(bench::parse_variant(label));
    if (!a.mating.empty() || !a.eval.empty()) {
        const auto matings = split_list(a.mating.empty() ? "S" : a.mating);
        const auto evals = split_list(a.eval.empty() ? "none" : a.eval);
        for (const auto& m : matings) {
            const auto mk = parse_mating(m);
            if (!mk) throw UsageError("unknown mating strategy '" + m + "'; valid: " + mating_tokens());
            for (const auto& e : evals) {
                const auto ek = parse_eval(e);
                if (!ek) throw UsageError("unknown evaluation strategy '" + e + "'; valid: " + eval_tokens());
                bench::Variant v;
                v.mating.kind = *mk;
                v.eval.kind = *ek;
                variants.push_back(v);
            }
        }
    }
    if (!variants.empty()) c.variants = variants;
    if (c.variants.empty()) c.variants.push_back({});
    if (a.hillclimb) for (auto& v : c.variants) v.hillclimb = true;
    if (a.runs > 0) c.runs_per_instance = a.runs;
    if (a.app->count("--seed")) c.base_seed = a.seed;
    if (a.instances > 0) c.generated_instances = a.instances;
    if (!a.instance_files.empty()) c.instance_paths = a.instance_files;
    if (a.tightness >= 0.0) {
        c.nurse_params.tightness = a.tightness;
        c.mall_params.tightness = a.tightness;
    }
    if (a.wall_clock >= 0.0) c.pyramid.wall_clock_limit = a.wall_clock;
    c.validate();
    return c;
}

int cmd_run(const RunArgs& a) {
    const auto format = format_of(a.format);
    const auto config = build_config(a);
    const fs::path dir = output_dir(a.out);
    write_file(dir / "config.json", bench::to_json(config));
    const auto results = bench::run_experiment(config, a.threads);
    write_file(dir / "results.csv", bench::results_to_csv(results));
    const std::string report = bench::emit_report(results, format);
    write_file(dir / (format == bench::ReportFormat::table ? "report.txt" : "report.csv"), report);
    std::cout << report;
    return 0;
}

struct ReportArgs {
    std::string results;
    std::string format = "table";
    std::string out;
    std::optional<double> bound_objective;
    std::optional<double> bound_feasibility;
};

int cmd_report(const ReportArgs& a) {
    auto results = bench::results_from_csv(slurp(a.results));
    results.bound_objective = a.bound_objective;
    results.bound_feasibility = a.bound_feasibility;
    const std::string report = bench::emit_report(results, format_of(a.format));
    if (!a.out.empty()) write_file(a.out, report);
    std::cout << report;
    return 0;
}

struct OracleArgs {
    std::string problem = "nurse";
    int instances = 5;
    std::uint64_t seed = 1;
    int max_nurses = 4;
};

int cmd_oracle(const OracleArgs& a) {
    const auto family = family_of(a.problem);
    if (a.max_nurses < 3 || a.max_nurses > 6) throw UsageError("--max-nurses must lie in [3, 6]");
    std::cout << "instance,seed,genes,space,feasible,optimum\n";
    for (int i = 0; i < a.instances; ++i) {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
        std::unique_ptr<Problem> problem;
        if (family == bench::Family::nurse) {
            problem = std::make_unique<nurse::NurseProblem>(nurse::generate_tiny_instance(a.max_nurses, seed));
        } else {
            problem = std::make_unique<mall::MallProblem>(mall::generate_tiny_mall_instance(seed));
        }
        const auto opt = enumerate_optimum(*problem);
        std::cout << i << ',' << seed << ',' << problem->length() << ',' << opt.evaluated << ',' << opt.feasible << ','
                  << (opt.best_raw ? std::to_string(*opt.best_raw) : std::string("none")) << '\n';
    }
    return 0;
}

// Quick invariant sweep; the full property suites live in the test binaries.
int cmd_selftest() {
    int failures = 0;
    const auto check = [&](const char* name, bool ok) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };
    Rng rng(2024);

    bool ok = true;
    for (int n = 0; n < 1000; ++n) {
        const auto s = mall::size_decompose(n);
        ok = ok && s[0] + 2 * s[1] + 3 * s[2] == n && s[2] == n / 3;
    }
    check("size decomposition totals", ok);

    ok = true;
    for (int t = 0; t < 1000; ++t) {
        Genes a(20), b(20);
        for (int i = 0; i < 20; ++i) {
            a[static_cast<std::size_t>(i)] = i;
            b[static_cast<std::size_t>(i)] = 100 + i;
        }
        const auto [c1, c2] = uniform_crossover(a, b, 0.66, rng);
        for (int i = 0; i < 20; ++i) {
            const auto k = static_cast<std::size_t>(i);
            ok = ok && (c1[k] == a[k] || c1[k] == b[k]) && (c1[k] == a[k]) == (c2[k] == b[k]);
        }
    }
    check("crossover gene provenance", ok);

    ok = true;
    const auto grid = ToroidalGrid::for_population(100);
    for (int i = 0; i < grid.cells(); ++i) {
        for (const Cell c : grid.neighbors(grid.cell_at(i))) {
            const auto back = grid.neighbors(c);
            ok = ok && std::find(back.begin(), back.end(), grid.cell_at(i)) != back.end();
        }
    }
    check("grid neighbourhood symmetry", ok);

    ok = true;
    for (int t = 0; t < 50; ++t) {
        const auto inst = nurse::generate_instance({}, static_cast<std::uint64_t>(t));
        Genes sol(static_cast<std::size_t>(inst.nurses()));
        for (int i = 0; i < inst.nurses(); ++i) {
            const auto f = nurse::feasible_patterns(inst, i);
            sol[static_cast<std::size_t>(i)] = f[rng.index(f.size())];
        }
        const auto fit = nurse::full_fitness(inst, sol, 3.0);
        ok = ok && fit.violation >= 0 && std::abs(fit.penalized - (fit.raw + 3.0 * fit.violation)) < 1e-9;
        const auto hc = nurse::hillclimb(inst, sol, 3.0);
        ok = ok && nurse::full_fitness(inst, hc.solution, 3.0).penalized <= fit.penalized;
    }
    check("nurse penalty consistency and hillclimb monotonicity", ok);

    ok = true;
    for (int t = 0; t < 50; ++t) {
        const auto inst = mall::generate_mall_instance({}, static_cast<std::uint64_t>(t));
        Genes sol(static_cast<std::size_t>(inst.locations));
        for (auto& g : sol) g = static_cast<int>(rng.index(static_cast<std::size_t>(inst.types)));
        const auto fit = mall::full_rent(inst, sol, 2.0);
        ok = ok && std::abs(fit.penalized - (fit.raw - 2.0 * fit.violation)) < 1e-9;
        ok = ok && mall::mall_instance_from_text(mall::to_text(inst)) == inst;
    }
    check("mall penalty consistency and instance round-trip", ok);

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pyramidal coevolutionary GA: nurse scheduling and mall tenant selection"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "write a seeded instance set");
    g->add_option("--problem", gen.problem, "nurse or mall");
    g->add_option("--instances", gen.instances, "number of instances")->check(CLI::PositiveNumber);
    g->add_option("--seed", gen.seed, "seed of the first instance");
    g->add_option("--out", gen.out, "output directory (default $PYRAMID_OUT or ./results)");
    g->add_flag("--tiny", gen.tiny, "tiny instances for exhaustive checks");
    g->add_option("--nurses", gen.nurses, "nurses per ward")->check(CLI::PositiveNumber);
    g->add_option("--tightness", gen.tightness, "constraint tightness in [0, 1]");
    g->add_option("--types", gen.types, "shop types")->check(CLI::PositiveNumber);

    RunArgs run;
    auto* r = app.add_subcommand("run", "run an experiment and write results.csv plus a report");
    run.app = r;
    r->add_option("--config", run.config, "experiment config file");
    r->add_option("--problem", run.problem, "nurse or mall");
    r->add_option("--mating", run.mating, "comma-separated mating strategies: " + mating_tokens());
    r->add_option("--eval", run.eval, "comma-separated evaluation strategies: " + eval_tokens());
    r->add_option("--strategies", run.strategies, "comma-separated row labels, e.g. SGA,C,S/RR&H");
    r->add_option("--seed", run.seed, "base seed");
    r->add_option("--runs", run.runs, "runs per instance")->check(CLI::PositiveNumber);
    r->add_option("--instances", run.instances, "number of generated instances")->check(CLI::PositiveNumber);
    r->add_option("--instance-files", run.instance_files, "instance files instead of generated ones");
    r->add_flag("--hillclimb", run.hillclimb, "attach the hillclimber (nurse)");
    r->add_option("--tightness", run.tightness, "generator tightness");
    r->add_option("--out", run.out, "output directory (default $PYRAMID_OUT or ./results)");
    r->add_option("--format", run.format, "table or csv");
    r->add_option("--threads", run.threads, "worker threads (default $PYRAMID_THREADS or 1)");
    r->add_option("--wall-clock", run.wall_clock, "per-run time limit in seconds, 0 disables");

    ReportArgs rep;
    auto* p = app.add_subcommand("report", "re-render a report from results.csv");
    p->add_option("results", rep.results, "results.csv")->required();
    p->add_option("--format", rep.format, "table or csv");
    p->add_option("--out", rep.out, "write the report to this file as well");
    p->add_option("--bound-objective", rep.bound_objective, "objective of the Bound row");
    p->add_option("--bound-feasibility", rep.bound_feasibility, "feasibility of the Bound row, fraction");

    OracleArgs orc;
    auto* o = app.add_subcommand("oracle", "exhaustive optimum of tiny generated instances");
    o->add_option("--problem", orc.problem, "nurse or mall");
    o->add_option("--instances", orc.instances, "number of instances")->check(CLI::PositiveNumber);
    o->add_option("--seed", orc.seed, "seed of the first instance");
    o->add_option("--max-nurses", orc.max_nurses, "nurses per tiny ward");

    auto* s = app.add_subcommand("selftest", "quick invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (*g) return cmd_generate(gen);
        if (*r) return cmd_run(run);
        if (*p) return cmd_report(rep);
        if (*o) return cmd_oracle(orc);
        if (*s) return cmd_selftest();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigurationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

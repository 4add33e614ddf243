#include "vqls/cli.hpp"

#include "vqls/problem_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace vqls::cli {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json budget_to_json(const EvaluationBudget &b) {
    return {{"norm_real", b.norm_real},
            {"norm_imaginary", b.norm_imaginary},
            {"raw_real", b.raw_real},
            {"raw_imaginary", b.raw_imaginary},
            {"circuits_norm", b.circuits_norm},
            {"circuits_raw_cost", b.circuits_raw_cost},
            {"norm_qubits", b.norm_qubits},
            {"qubits_required", b.qubits_required},
            {"imaginary_doubling_applied", b.imaginary_doubling_applied}};
}

json config_to_json(const SolveOptions &o, std::uint64_t seed) {
    json c{{"problem", o.problem.string()},
           {"method", to_string(o.method)},
           {"kind", to_string(o.kind)},
           {"lr", o.lr},
           {"steps", o.steps},
           {"shots_final", o.shots_final},
           {"seed", seed},
           {"depth", o.depth},
           {"max_depth", o.max_depth},
           {"grow", o.grow}};
    c["shots"] = o.shots ? json(*o.shots) : json(nullptr);
    return c;
}

void write_run(const std::filesystem::path &dir, const RunReport &report) {
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "losses.csv", losses_csv(report.losses));
    write_file_atomic(dir / "report.json", report.to_json().dump(2) + "\n");
}

void print_summary(std::ostream &out, const RunReport &r, unsigned n_qubits) {
    out << "seed " << r.config.at("seed").get<std::uint64_t>() << ": " << r.losses.size() << " steps, final loss "
        << format_double(r.losses.back()) << ", depth " << r.final_depth;
    if (!r.growth_events.empty()) {
        out << " (grown at steps";
        for (auto s : r.growth_events) {
            out << ' ' << s;
        }
        out << ')';
    }
    out << ", circuits " << r.circuit_count_total << '\n';
    out << "  state     sampled      exact        truth\n";
    for (std::size_t i = 0; i < r.final_probabilities.size(); ++i) {
        out << "  " << std::setw(8) << std::left << basis_label(i, n_qubits) << std::right << std::fixed
            << std::setprecision(6) << std::setw(10) << r.final_probabilities[i] << std::setw(13)
            << r.exact_probabilities[i];
        if (r.ground_truth) {
            out << std::setw(13) << (*r.ground_truth)[i];
        }
        out << '\n' << std::defaultfloat;
    }
    if (r.total_variation) {
        out << "  total-variation distance to ground truth: " << format_double(*r.total_variation) << '\n';
    }
}

json aggregate(const std::vector<RunReport> &runs) {
    std::size_t max_steps = 0;
    for (const auto &r : runs) {
        max_steps = std::max(max_steps, r.losses.size());
    }
    json steps = json::array();
    for (std::size_t s = 0; s < max_steps; ++s) {
        std::vector<double> v;
        for (const auto &r : runs) {
            if (s < r.losses.size()) {
                v.push_back(r.losses[s]);
            }
        }
        steps.push_back({{"step", s},
                         {"loss_median", percentile(v, 50.0)},
                         {"loss_p25", percentile(v, 25.0)},
                         {"loss_p75", percentile(v, 75.0)}});
    }
    json states = json::array();
    const std::size_t dim = runs.front().final_probabilities.size();
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> v;
        for (const auto &r : runs) {
            v.push_back(r.final_probabilities[i]);
        }
        json entry{{"index", i},
                   {"median", percentile(v, 50.0)},
                   {"p25", percentile(v, 25.0)},
                   {"p75", percentile(v, 75.0)}};
        if (runs.front().ground_truth) {
            entry["ground_truth"] = (*runs.front().ground_truth)[i];
        }
        states.push_back(std::move(entry));
    }
    std::vector<double> finals;
    for (const auto &r : runs) {
        finals.push_back(r.losses.back());
    }
    return {{"seeds", runs.size()},
            {"final_loss_median", percentile(finals, 50.0)},
            {"final_loss_p25", percentile(finals, 25.0)},
            {"final_loss_p75", percentile(finals, 75.0)},
            {"steps", std::move(steps)},
            {"final_probabilities", std::move(states)}};
}

std::string aggregate_csv(const json &agg) {
    std::ostringstream os;
    os << "step,loss_median,loss_p25,loss_p75\n";
    for (const auto &s : agg.at("steps")) {
        os << s.at("step").get<std::size_t>() << ',' << format_double(s.at("loss_median").get<double>()) << ','
           << format_double(s.at("loss_p25").get<double>()) << ',' << format_double(s.at("loss_p75").get<double>())
           << '\n';
    }
    return os.str();
}

} // namespace

json RunReport::to_json() const {
    json j{{"config", config},
           {"losses", losses},
           {"growth_events", growth_events},
           {"final_probabilities", final_probabilities},
           {"exact_probabilities", exact_probabilities},
           {"circuit_count_total", circuit_count_total},
           {"budget_per_evaluation", budget_to_json(budget)},
           {"final_depth", final_depth},
           {"final_params", final_params},
           {"wall_clock_seconds", wall_clock_seconds}};
    j["ground_truth_probabilities"] = ground_truth ? json(*ground_truth) : json(nullptr);
    j["total_variation_distance"] = total_variation ? json(*total_variation) : json(nullptr);
    return j;
}

double total_variation_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("distributions differ in length");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d += std::abs(p[i] - q[i]);
    }
    return 0.5 * d;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw std::invalid_argument("percentile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::string losses_csv(std::span<const double> losses) {
    std::ostringstream os;
    os << "step,loss\n";
    for (std::size_t s = 0; s < losses.size(); ++s) {
        os << s << ',' << format_double(losses[s]) << '\n';
    }
    return os.str();
}

void write_file_atomic(const std::filesystem::path &path, const std::string &contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        f << contents;
        if (!f) {
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

RunReport run_single(const LSEProblem &problem, const SolveOptions &options, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();

    TrainConfig config;
    config.steps = options.steps;
    config.learning_rate = options.lr;
    config.cost = CostSpec{options.kind, options.method, options.shots};
    config.growth.enabled = options.grow;
    config.growth.max_depth = options.max_depth;
    config.initial_depth = options.depth;
    config.seed = seed;
    if (options.shots_final > 0) {
        config.final_shots = options.shots_final;
    }

    const auto ansatz = std::make_shared<LayeredAnsatz>(problem.n_qubits());
    TrainingTrace trace = solve(problem, config, ansatz);

    RunReport r;
    r.config = config_to_json(options, seed);
    r.losses = trace.losses;
    r.growth_events = trace.growth_events;
    r.final_probabilities = trace.final_probabilities;
    r.exact_probabilities = trace.exact_probabilities;
    r.circuit_count_total = trace.circuit_count_total;
    r.budget = expected_budget(problem, *ansatz, config.cost);
    r.final_depth = trace.final_params.depth;
    r.final_params = trace.final_params.angles;
    try {
        const Vector x = classical_solution(problem);
        std::vector<double> truth(static_cast<std::size_t>(x.size()));
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            truth[static_cast<std::size_t>(i)] = std::norm(x[i]);
        }
        r.total_variation = total_variation_distance(r.final_probabilities, truth);
        r.ground_truth = std::move(truth);
    } catch (const SingularSystemError &) {
        // no ground truth for a singular system; the report carries nulls
    }
    r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

int run_solve(const SolveOptions &options, std::ostream &out, std::ostream &err) {
    std::optional<LSEProblem> problem;
    try {
        problem.emplace(load_problem_file(options.problem));
        CostSpec{options.kind, options.method, options.shots}.validate(*problem);
        if (options.seeds < 1) {
            throw std::invalid_argument("--seeds must be at least 1");
        }
        if (options.max_depth < options.depth) {
            throw std::invalid_argument("--max-depth is below --depth");
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
    for (const auto &w : problem->warnings()) {
        err << "warning: " << w << '\n';
    }
    try {
        classical_solution(*problem);
    } catch (const SingularSystemError &e) {
        err << "warning: no classical ground truth: " << e.what() << '\n';
    }

    try {
        if (options.seeds == 1) {
            const RunReport r = run_single(*problem, options, options.seed);
            write_run(options.output, r);
            print_summary(out, r, problem->n_qubits());
            return kOk;
        }
        std::vector<std::future<RunReport>> jobs;
        for (std::size_t s = 0; s < options.seeds; ++s) {
            const std::uint64_t seed = options.seed + s;
            jobs.push_back(std::async(std::launch::async, [&, seed] {
                RunReport r = run_single(*problem, options, seed);
                write_run(options.output / ("seed_" + std::to_string(seed)), r);
                return r;
            }));
        }
        std::vector<RunReport> runs;
        for (auto &j : jobs) {
            runs.push_back(j.get());
        }
        for (const auto &r : runs) {
            print_summary(out, r, problem->n_qubits());
        }
        const json agg = aggregate(runs);
        std::filesystem::create_directories(options.output);
        write_file_atomic(options.output / "aggregate.json", agg.dump(2) + "\n");
        write_file_atomic(options.output / "aggregate.csv", aggregate_csv(agg));
        out << "median final loss over " << runs.size()
            << " seeds: " << format_double(agg.at("final_loss_median").get<double>()) << '\n';
        return kOk;
    } catch (const TrainingDivergedError &e) {
        err << "error: training diverged: " << e.what() << '\n';
        return kTrainingFailed;
    } catch (const DegenerateNormError &e) {
        err << "error: training failed: " << e.what() << '\n';
        return kTrainingFailed;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

int run_decompose(const std::filesystem::path &matrix_file, std::ostream &out, std::ostream &err) {
    try {
        const json doc = read_json_file(matrix_file);
        const Matrix m = parse_matrix(doc.is_object() ? doc.at("matrix") : doc);
        const auto terms = decompose_matrix_to_pauli(m);
        Matrix rebuilt = Matrix::Zero(m.rows(), m.cols());
        for (const auto &t : terms) {
            rebuilt += t.coefficient * PauliString(t.label).matrix();
            out << t.label << ' ' << format_double(t.coefficient.real()) << ' ' << format_double(t.coefficient.imag())
                << '\n';
        }
        const double error = (rebuilt - m).cwiseAbs().maxCoeff();
        out << "# " << terms.size() << " term(s), reconstruction error " << format_double(error) << '\n';
        return kOk;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }
}

int run_bench(const std::vector<unsigned> &ns, const std::vector<std::size_t> &ms, std::ostream &out) {
    struct Row {
        const char *term;
        Method method;
        CostKind kind;
        bool norm;
    };
    static const Row rows[] = {
        {"norm", Method::Direct, CostKind::Global, true},      {"norm", Method::Hadamard, CostKind::Global, true},
        {"global", Method::Direct, CostKind::Global, false},   {"global", Method::Hadamard, CostKind::Global, false},
        {"global", Method::Overlap, CostKind::Global, false},  {"global", Method::Coherent, CostKind::Global, false},
        {"local", Method::Direct, CostKind::Local, false},     {"local", Method::Hadamard, CostKind::Local, false},
        {"local", Method::Overlap, CostKind::Local, false},    {"local", Method::Coherent, CostKind::Local, false},
    };
    out << std::left << std::setw(4) << "n" << std::setw(5) << "m" << std::setw(8) << "term" << std::setw(10)
        << "method" << std::setw(8) << "qubits"
        << "evaluations\n";
    for (unsigned n : ns) {
        for (std::size_t m : ms) {
            for (const Row &row : rows) {
                out << std::setw(4) << n << std::setw(5) << m << std::setw(8) << row.term << std::setw(10)
                    << to_string(row.method);
                try {
                    const EvaluationBudget b = count_evaluations(row.method, row.kind, n, m);
                    const unsigned qubits = row.norm ? b.norm_qubits : b.qubits_required;
                    const std::size_t evals = row.norm ? b.circuits_norm : b.circuits_raw_cost;
                    out << std::setw(8) << qubits << evals << '\n';
                } catch (const CostSpecError &) {
                    out << std::setw(8) << "n/a"
                        << "n/a\n";
                }
            }
        }
    }
    out << std::right;
    return kOk;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Variational linear-system solver on a statevector simulator"};
    app.require_subcommand(1);

    SolveOptions so;
    std::string method = "direct";
    bool local = false;
    bool global = false;
    bool no_grow = false;
    std::size_t shots = 0;
    auto *solve_cmd = app.add_subcommand("solve", "Train the ansatz on a problem file");
    solve_cmd->add_option("--problem", so.problem, "Problem JSON file")->required();
    solve_cmd->add_option("--method", method, "direct | hadamard | overlap | coherent")
        ->check(CLI::IsMember({"direct", "hadamard", "overlap", "coherent"}));
    auto *global_flag = solve_cmd->add_flag("--global", global, "Global cost (default)");
    solve_cmd->add_flag("--local", local, "Local cost")->excludes(global_flag);
    solve_cmd->add_option("--lr", so.lr, "Adam learning rate")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--steps", so.steps, "Training steps")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--shots", shots, "Shots per training circuit (default: exact)");
    solve_cmd->add_option("--shots-final", so.shots_final, "Shots for sampling the trained state (0: exact)");
    solve_cmd->add_option("--seed", so.seed, "Random seed");
    solve_cmd->add_option("--depth", so.depth, "Initial ansatz depth");
    solve_cmd->add_option("--max-depth", so.max_depth, "Largest depth reachable by growth");
    solve_cmd->add_flag("--no-grow", no_grow, "Disable ansatz growth");
    solve_cmd->add_option("--output", so.output, "Output directory");
    solve_cmd->add_option("--seeds", so.seeds, "Independent runs with seeds seed, seed+1, ...");

    std::filesystem::path matrix_file;
    auto *decompose_cmd = app.add_subcommand("decompose", "Pauli decomposition of a matrix");
    decompose_cmd->add_option("--matrix", matrix_file, "Matrix JSON file")->required();

    std::vector<unsigned> ns{3};
    std::vector<std::size_t> ms{3};
    auto *bench_cmd = app.add_subcommand("bench", "Circuit and qubit budgets per evaluation method");
    bench_cmd->add_option("--n", ns, "System qubit counts");
    bench_cmd->add_option("--m", ms, "Term counts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    if (*solve_cmd) {
        so.method = parse_method(method);
        so.kind = local ? CostKind::Local : CostKind::Global;
        so.grow = !no_grow;
        if (shots > 0) {
            so.shots = shots;
        }
        return run_solve(so, out, err);
    }
    if (*decompose_cmd) {
        return run_decompose(matrix_file, out, err);
    }
    return run_bench(ns, ms, out);
}

} // namespace vqls::cli

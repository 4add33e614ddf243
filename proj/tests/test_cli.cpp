#include "vqls/cli.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vqls;

namespace {

const fs::path kData = VQLS_DATA_DIR;

class ScratchDir {
  public:
    ScratchDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("vqls_cli_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path &path() const { return path_; }

  private:
    fs::path path_;
};

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path &p, const std::string &s) { std::ofstream(p, std::ios::binary) << s; }

int run_cli(std::vector<std::string> args, std::string *out_text = nullptr, std::string *err_text = nullptr) {
    args.insert(args.begin(), "vqls");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

std::vector<std::string> csv_lines(const std::string &text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) lines.push_back(line);
    return lines;
}

} // namespace

TEST(Helpers, TotalVariation) {
    const std::vector<double> p{0.5, 0.5, 0.0}, q{0.0, 0.5, 0.5};
    EXPECT_DOUBLE_EQ(cli::total_variation_distance(p, q), 0.5);
    EXPECT_DOUBLE_EQ(cli::total_variation_distance(p, p), 0.0);
}

TEST(Helpers, Percentile) {
    const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
    EXPECT_DOUBLE_EQ(cli::percentile(v, 50.0), 2.5);
    EXPECT_DOUBLE_EQ(cli::percentile(v, 25.0), 1.75);
    EXPECT_DOUBLE_EQ(cli::percentile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(cli::percentile(v, 100.0), 4.0);
}

TEST(Helpers, LossesCsvPrecision) {
    const std::vector<double> l{0.1234567890123456789, 1e-7};
    const auto lines = csv_lines(cli::losses_csv(l));
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[0], "step,loss");
    EXPECT_EQ(std::stod(lines[1].substr(2)), l[0]);
    EXPECT_EQ(std::stod(lines[2].substr(2)), l[1]);
}

TEST(Solve, WritesArtifacts) {
    ScratchDir dir;
    std::string out;
    const int code = run_cli({"solve", "--problem", (kData / "pauli_3q.json").string(), "--method", "hadamard",
                              "--global", "--lr", "0.01", "--steps", "12", "--seed", "7", "--shots-final", "1000",
                              "--output", dir.path().string()},
                             &out);
    ASSERT_EQ(code, 0) << out;
    const auto lines = csv_lines(slurp(dir.path() / "losses.csv"));
    ASSERT_EQ(lines.size(), 13u);
    EXPECT_EQ(lines[0], "step,loss");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto comma = lines[i].find(',');
        EXPECT_EQ(std::stoul(lines[i].substr(0, comma)), i - 1);
        EXPECT_TRUE(std::isfinite(std::stod(lines[i].substr(comma + 1))));
    }

    const json report = json::parse(slurp(dir.path() / "report.json"));
    const auto p = report.at("final_probabilities").get<std::vector<double>>();
    const auto q = report.at("ground_truth_probabilities").get<std::vector<double>>();
    double sp = 0.0, sq = 0.0;
    for (double v : p) sp += v;
    for (double v : q) sq += v;
    EXPECT_NEAR(sp, 1.0, 1e-9);
    EXPECT_NEAR(sq, 1.0, 1e-9);
    const double tv = report.at("total_variation_distance").get<double>();
    EXPECT_GE(tv, 0.0);
    EXPECT_LE(tv, 1.0);
    EXPECT_NEAR(tv, cli::total_variation_distance(p, q), 1e-12);
    EXPECT_EQ(report.at("losses").size(), 12u);
    EXPECT_EQ(report.at("budget_per_evaluation").at("circuits_norm").get<int>(), 3);
    EXPECT_EQ(report.at("budget_per_evaluation").at("qubits_required").get<int>(), 4);
}

TEST(Solve, ByteIdenticalReruns) {
    ScratchDir a, b;
    const std::vector<std::string> common{"solve", "--problem", (kData / "pauli_3q.json").string(), "--steps", "10",
                                          "--seed", "3"};
    auto args_a = common, args_b = common;
    args_a.insert(args_a.end(), {"--output", a.path().string()});
    args_b.insert(args_b.end(), {"--output", b.path().string()});
    ASSERT_EQ(run_cli(args_a), 0);
    ASSERT_EQ(run_cli(args_b), 0);
    EXPECT_EQ(slurp(a.path() / "losses.csv"), slurp(b.path() / "losses.csv"));
}

TEST(Solve, CircuitRhsFile) {
    ScratchDir a, b;
    ASSERT_EQ(run_cli({"solve", "--problem", (kData / "pauli_3q.json").string(), "--steps", "5", "--output",
                       a.path().string()}),
              0);
    ASSERT_EQ(run_cli({"solve", "--problem", (kData / "pauli_3q_circuit_b.json").string(), "--steps", "5",
                       "--output", b.path().string()}),
              0);
    const auto la = json::parse(slurp(a.path() / "report.json")).at("losses").get<std::vector<double>>();
    const auto lb = json::parse(slurp(b.path() / "report.json")).at("losses").get<std::vector<double>>();
    ASSERT_EQ(la.size(), lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) EXPECT_NEAR(la[i], lb[i], 1e-10);
}

TEST(Solve, MultiSeedAggregate) {
    ScratchDir dir;
    ASSERT_EQ(run_cli({"solve", "--problem", (kData / "pauli_3q.json").string(), "--steps", "4", "--seeds", "3",
                       "--seed", "10", "--output", dir.path().string()}),
              0);
    for (int s : {10, 11, 12}) {
        EXPECT_TRUE(fs::exists(dir.path() / ("seed_" + std::to_string(s)) / "losses.csv"));
    }
    const json agg = json::parse(slurp(dir.path() / "aggregate.json"));
    EXPECT_EQ(agg.at("seeds").get<int>(), 3);
    EXPECT_LE(agg.at("final_loss_p25").get<double>(), agg.at("final_loss_median").get<double>());
    EXPECT_LE(agg.at("final_loss_median").get<double>(), agg.at("final_loss_p75").get<double>());
    EXPECT_EQ(csv_lines(slurp(dir.path() / "aggregate.csv")).size(), 5u);
}

TEST(Solve, OverlapLocalRejected) {
    ScratchDir dir;
    std::string err;
    const int code = run_cli({"solve", "--problem", (kData / "pauli_3q.json").string(), "--method", "overlap",
                              "--local", "--output", dir.path().string()},
                             nullptr, &err);
    EXPECT_EQ(code, 2);
    EXPECT_NE(err.find("overlap supports global cost only"), std::string::npos);
}

TEST(Solve, InvalidInputs) {
    ScratchDir dir;
    EXPECT_EQ(run_cli({"solve", "--problem", (dir.path() / "missing.json").string()}), 2);
    spit(dir.path() / "bad.json", "{ not json");
    EXPECT_EQ(run_cli({"solve", "--problem", (dir.path() / "bad.json").string()}), 2);
    EXPECT_EQ(run_cli({"solve", "--problem", (kData / "pauli_3q.json").string(), "--method", "nope"}), 2);
    spit(dir.path() / "matrix.json",
         R"({"n": 1, "mode": "matrix", "matrix": [[1, 0], [0, 2]], "b": {"vector": [1, 0]}})");
    std::string err;
    EXPECT_EQ(run_cli({"solve", "--problem", (dir.path() / "matrix.json").string(), "--method", "hadamard"}, nullptr,
                      &err),
              2);
    EXPECT_NE(err.find("direct"), std::string::npos);
}

TEST(Solve, DegenerateSystemExitsThree) {
    ScratchDir dir;
    spit(dir.path() / "zero.json", R"({"n": 1, "mode": "matrix", "matrix": [[0, 0], [0, 0]], "b": {"vector": [1, 0]}})");
    EXPECT_EQ(run_cli({"solve", "--problem", (dir.path() / "zero.json").string(), "--output", dir.path().string()}),
              3);
    spit(dir.path() / "cancel.json", R"({"n": 1, "mode": "pauli",
        "terms": [{"pauli": "Z", "coeff": 1}, {"pauli": "Z", "coeff": -1}], "b": {"vector": [1, 0]}})");
    EXPECT_EQ(run_cli({"solve", "--problem", (dir.path() / "cancel.json").string(), "--method", "hadamard",
                       "--output", dir.path().string()}),
              3);
}

TEST(Decompose, IdentityMatrix) {
    ScratchDir dir;
    spit(dir.path() / "id.json", R"({"matrix": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]})");
    std::string out;
    ASSERT_EQ(run_cli({"decompose", "--matrix", (dir.path() / "id.json").string()}, &out), 0);
    const auto lines = csv_lines(out);
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0].substr(0, 3), "II ");
    EXPECT_NE(lines[1].find("1 term(s)"), std::string::npos);
}

TEST(Decompose, BadDimensionIsInvalidInput) {
    ScratchDir dir;
    spit(dir.path() / "m.json", R"([[1,0,0],[0,1,0],[0,0,1]])");
    EXPECT_EQ(run_cli({"decompose", "--matrix", (dir.path() / "m.json").string()}), 2);
}

TEST(Bench, ThreeByThreeTable) {
    std::string out;
    ASSERT_EQ(run_cli({"bench", "--n", "3", "--m", "3"}, &out), 0);
    auto row = [&](const std::string &term, const std::string &method) {
        for (const auto &line : csv_lines(out)) {
            std::istringstream is(line);
            std::string n, m, t, meth, qubits, evals;
            is >> n >> m >> t >> meth >> qubits >> evals;
            if (t == term && meth == method) return qubits + " " + evals;
        }
        return std::string("missing");
    };
    EXPECT_EQ(row("norm", "hadamard"), "4 3");
    EXPECT_EQ(row("global", "hadamard"), "4 3");
    EXPECT_EQ(row("global", "overlap"), "7 6");
    EXPECT_EQ(row("global", "coherent"), "5 1");
    EXPECT_EQ(row("local", "hadamard"), "4 18");
    EXPECT_EQ(row("global", "direct"), "3 1");
    EXPECT_EQ(row("local", "overlap"), "n/a n/a");
}

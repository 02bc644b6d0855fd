#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "qhlab/config.hpp"
#include "qhlab/csv.hpp"
#include "qhlab/run.hpp"

using namespace qhlab;
namespace fs = std::filesystem;

namespace {

struct TempRoot {
    fs::path p;
    TempRoot() {
        p = fs::temp_directory_path() / ("qhlab_harness_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
    }
    ~TempRoot() { fs::remove_all(p); }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream is(p);
    std::string l;
    std::getline(is, l);
    return l;
}

RunResult go(Command c, const std::string& cfg, const fs::path& root, unsigned threads = 1) {
    RunOptions o;
    o.command = c;
    o.config_text = cfg;
    o.out_root = root;
    o.threads = threads;
    o.print_summary = false;
    return run(o);
}

struct Case {
    Command cmd;
    std::string cfg;
    std::string main_csv;
    std::string header;
};

const std::vector<Case>& cases() {
    static const std::vector<Case> c{
        {Command::simulate, "grid.n = 32\nmc.m_paths = 3\nmc.seed = 4\n", "paths.csv", "path,i,t,value"},
        {Command::check_conditions, "model.variant = subfbm\nconditions.grid_size = 8\n", "conditions.csv",
         "check,claimed,holds,value,aux1,aux2"},
        {Command::smallball, "grid.n = 128\nmc.m_paths = 1000\nsmallball.eps_list = 0.5,0.8\nsmallball.certify_grid = 8\n",
         "smallball_report.csv", "eps,delta,kind,mc_estimate,mc_halfwidth,bound,pass"},
        {Command::frac_check, "grid.n = 64\nmc.m_paths = 2\n", "frac_check.csv",
         "path,integrand,gls,rs,rs_error,alpha_norm,lambda_alpha,bound,holds"},
        {Command::replicate, "grid.n = 1024\nmc.m_paths = 2\nreplicate.N_blocks = 6\n", "traces/trace_00000.csv",
         "n,case,tau_index,block_target,achieved,V_at_tn,Z_at_tn_minus_1,alpha_norm_tail"},
        {Command::lemma_divergence, "grid.n = 2048\nmc.m_paths = 2\nlemma.N_blocks = 10\n", "lemma_divergence.csv",
         "path,hit,hit_block,cumulative,clipped_cumulative,clipped_hit,successes"},
    };
    return c;
}

}  // namespace

TEST_CASE("config examples") {
    auto r = parse_config("model.variant = fbm\nmodel.H = 0.75\n");
    REQUIRE(r.ok());
    ProcessModel m = build_model(r.config->model);
    REQUIRE(std::holds_alternative<FBM>(m.variant()));
    CHECK(std::get<FBM>(m.variant()).H == 0.75);

    auto e = parse_config("model.H = 1.5\n");
    REQUIRE(e.errors.size() == 1);
    CHECK(e.errors[0].line == 1);
    CHECK(e.errors[0].str().find("line 1") != std::string::npos);

    auto l = parse_config("# radii\nsmallball.eps_list = 0.3,0.4,0.5  # trailing\n\n");
    REQUIRE(l.ok());
    CHECK(l.config->eps_list == std::vector<double>{0.3, 0.4, 0.5});
    CHECK(l.config->given.at("smallball.eps_list") == "0.3,0.4,0.5");
}

TEST_CASE("config collects every error with its line") {
    auto r = parse_config("model.H = 0.6\nmodel.colour = red\ngrid.n = many\nnonsense\nmodel.H = 0.7\nmc.seed =\n");
    REQUIRE(r.errors.size() == 5);
    std::vector<int> lines;
    for (auto& e : r.errors) lines.push_back(e.line);
    CHECK(lines == std::vector<int>{2, 3, 4, 5, 6});
    CHECK(r.errors[0].message == "unknown key");
    CHECK(r.errors[3].message.find("duplicate") != std::string::npos);

    auto w = parse_config("grid.t0 = 0.5\ngrid.delta = 0.75\n");
    REQUIRE(w.errors.size() == 1);
    CHECK(w.errors[0].line == 2);

    auto b = parse_config("model.variant = fbm\nsmallball.estimator = bridge\n");
    REQUIRE(b.errors.size() == 1);
    CHECK(b.errors[0].line == 2);
    CHECK(parse_config("model.variant = wiener\nsmallball.estimator = bridge\n").ok());
}

TEST_CASE("resolved keys and help") {
    auto r = parse_config("");
    REQUIRE(r.ok());
    const std::string help = config_help();
    for (const auto& [k, v] : r.config->resolved) CHECK(help.find(k) != std::string::npos);
    CHECK(r.config->resolved.count("model.H") == 1);
    CHECK(r.config->resolved.count("lemma.M") == 1);
    for (auto c : {"simulate", "check-conditions", "smallball", "frac-check", "replicate", "lemma-divergence"})
        CHECK(parse_command(c).has_value());
    CHECK_FALSE(parse_command("simulat").has_value());
}

TEST_CASE("number formatting round trips") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-30, 30);
    for (int i = 0; i < 2000; ++i) {
        double x = std::copysign(std::pow(10.0, u(gen)), u(gen));
        std::string s = fmt_real(x);
        double y = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), y);
        REQUIRE(y == x);
    }
    CHECK(fmt_real(-0.0) == "0");
    CHECK(fmt_real(0.1) == "0.10000000000000001");
    CHECK(fmt_real(std::nan("")) == "nan");
    CsvTable t({"a", "b"});
    t.cell(1).cell(true);
    t.end_row();
    t.cell(std::string("x"));
    CHECK_THROWS(t.end_row());
    CHECK(split_csv_line("1,2.5,true") == std::vector<std::string>{"1", "2.5", "true"});
}

TEST_CASE("golden headers, manifest and determinism per command") {
    TempRoot root;
    for (const Case& c : cases()) {
        CAPTURE(command_name(c.cmd));
        RunResult a = go(c.cmd, c.cfg, root.p, 1);
        REQUIRE(a.exit_code == 0);
        CHECK(first_line(a.dir / c.main_csv) == c.header);
        CHECK(a.dir.filename().string().rfind(std::string(command_name(c.cmd)) + "-", 0) == 0);

        auto man = nlohmann::json::parse(slurp(a.dir / "manifest.json"));
        CHECK(man["status"] == "ok");
        CHECK(man["version"] == kVersion);
        CHECK(man["outputs"].size() == a.outputs.size());
        CHECK(man["resolved"].size() == parse_config("").config->resolved.size());

        RunResult b = go(c.cmd, c.cfg, root.p, 4);
        REQUIRE(b.exit_code == 0);
        CHECK(b.dir != a.dir);
        REQUIRE(a.outputs == b.outputs);
        for (const auto& f : a.outputs) CHECK(slurp(a.dir / f) == slurp(b.dir / f));
    }
}

TEST_CASE("check-conditions and smallball extras") {
    TempRoot root;
    auto k = go(Command::check_conditions, "model.variant = volterra-wiener\nconditions.grid_size = 8\n", root.p);
    REQUIRE(k.exit_code == 0);
    CHECK(slurp(k.dir / "conditions.csv").find("kernel-B1") != std::string::npos);
    auto s = go(Command::smallball, cases()[2].cfg, root.p);
    REQUIRE(s.exit_code == 0);
    CHECK(first_line(s.dir / "smallball_constants.csv") == "name,value");
    CHECK_FALSE(s.flags.empty());
}

TEST_CASE("replicate with a zero target") {
    TempRoot root;
    auto r = go(Command::replicate, "grid.n = 1024\nmc.m_paths = 3\nreplicate.N_blocks = 6\nreplicate.target = zero\n",
                root.p);
    REQUIRE(r.exit_code == 0);
    std::ifstream is(r.dir / "replicate_summary.csv");
    std::string line;
    std::getline(is, line);
    CHECK(line == "path,terminal_error,failed_blocks,case1_blocks,last_case1,case1_after_6,tail_decreasing");
    int rows = 0;
    while (std::getline(is, line)) {
        auto f = split_csv_line(line);
        CHECK(std::stod(f[1]) <= 1e-12);
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("exit codes and cleanup") {
    TempRoot root;
    auto bad = go(Command::simulate, "grid.n = 32\nmodel.H = 1.5\n", root.p);
    CHECK(bad.exit_code == 1);
    CHECK(bad.error.find("line 2") != std::string::npos);
    CHECK(bad.dir.empty());

    // passes parsing, fails in the command: the half-written directory goes away
    auto dom = go(Command::replicate, "grid.n = 256\ngrid.t0 = 0.5\ngrid.delta = 0.5\nmc.m_paths = 1\n", root.p);
    CHECK(dom.exit_code == 1);
    CHECK(dom.dir.empty());
    CHECK(fs::is_empty(root.p));

    RunOptions o;
    o.command = Command::simulate;
    o.config_text = "grid.n = 16\nmc.m_paths = 2\n";
    o.out_root = root.p;
    o.seed = 77;
    o.print_summary = false;
    auto s = run(o);
    REQUIRE(s.exit_code == 0);
    const std::string name = s.dir.filename().string();
    CHECK(name.substr(name.size() - 3) == "-77");
    auto man = nlohmann::json::parse(slurp(s.dir / "manifest.json"));
    CHECK(man["seed"] == 77);
    CHECK(man["resolved"]["mc.seed"] == "77");
}

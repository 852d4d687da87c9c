#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pathwise/cli/commands.hpp"
#include "pathwise/cli/options.hpp"
#include "pathwise/cli/report.hpp"
#include "pathwise/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace pathwise;
using namespace pathwise::cli;

namespace {

struct CmdResult {
    int exit_code;
    std::string output;
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = std::string(PATHWISE_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, got);
    const int status = pclose(pipe);
    return CmdResult{WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (start <= line.size()) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

// quantity -> cells, from a CSV report with a leading quantity column.
std::map<std::string, std::vector<std::string>> csv_rows(const std::string& text) {
    std::map<std::string, std::vector<std::string>> rows;
    const auto lines = split_lines(text);
    for (std::size_t i = 2; i < lines.size(); ++i) {
        auto cells = split_cells(lines[i]);
        if (!cells.empty()) rows[cells[0]] = cells;
    }
    return rows;
}

std::string temp_path(const std::string& name) {
    return std::string("cli_test_") + name;
}

} // namespace

TEST_CASE("process string parsing") {
    CHECK(parse_process("gaussian:mu=0.05,sigma=0.2").describe() ==
          "gaussian:mu=0.05,sigma=0.2");
    CHECK(parse_process("gaussian").describe() == "gaussian:mu=0,sigma=1");
    CHECK(parse_process("die").is_discrete());
    CHECK(parse_process("coin").is_discrete());
    CHECK(parse_process("studentt:nu=3").describe() == "studentt:mu=0,scale=1,nu=3");
    CHECK(parse_process("ar1:phi=0.5").is_ar1());
    CHECK(parse_process("discrete:values=1|2,probs=1/4|3/4").describe() ==
          "discrete:values=1|2,probs=1/4|3/4");

    CHECK_THROWS_AS(parse_process("ar1:phi=2.0"), validation_error);
    CHECK_THROWS_AS(parse_process("gaussian:sigma=-1"), validation_error);
    CHECK_THROWS_AS(parse_process("weibull:k=2"), validation_error);
    CHECK_THROWS_AS(parse_process("gaussian:nu=3"), validation_error);
    CHECK_THROWS_AS(parse_process("discrete:values=1|2,probs=1/2|1/4"), validation_error);
}

TEST_CASE("schedule string parsing") {
    CHECK(parse_schedule("lump:6", false).label() == "lump");
    CHECK(parse_schedule("dca:6", false).horizon() == 6);
    CHECK(parse_schedule("unit:4", false).a()[0] == doctest::Approx(5.0 / 8.0));
    CHECK(parse_schedule("last:3", false).a()[0] == 0.0);
    const auto c = parse_schedule("custom:0.5,0.5", false);
    CHECK(c.a()[1] == 1.0);
    CHECK(parse_schedule("custom:1/3;1/3;1/3", false).horizon() == 3);

    CHECK_THROWS_AS(parse_schedule("lump", false), validation_error);
    CHECK_THROWS_AS(parse_schedule("lump:0", false), validation_error);
    CHECK_THROWS_AS(parse_schedule("custom:0.5,-0.5", false), validation_error);
    CHECK_THROWS_AS(parse_schedule("custom:1.5", false), validation_error); // leverage
    CHECK(parse_schedule("custom:1.5", true).max_a() == 1.5);
}

TEST_CASE("horizon range parsing") {
    CHECK(parse_horizon_range("4") == std::vector<std::int64_t>{4});
    CHECK(parse_horizon_range("1..5") == std::vector<std::int64_t>{1, 2, 3, 4, 5});
    CHECK(parse_horizon_range("10..30:10") == std::vector<std::int64_t>{10, 20, 30});
    CHECK_THROWS_AS(parse_horizon_range("5..1"), validation_error);
    CHECK_THROWS_AS(parse_horizon_range("0..4"), validation_error);
    CHECK_THROWS_AS(parse_horizon_range("x..4"), validation_error);
}

TEST_CASE("canonical config round-trips") {
    RunConfig cfg;
    cfg.command = "verify";
    cfg.process = "die";
    cfg.schedule = "dca:3";
    cfg.paths = 12345;
    cfg.seed = 99;
    cfg.z_max = 3.5;
    cfg.exact = true;
    cfg.workers = 7; // execution hint: not part of the canonical config

    const auto j = canonical_config(cfg);
    const RunConfig back = config_from_json(j);
    CHECK(canonical_config(back) == j);
    CHECK(back.paths == 12345);
    CHECK(back.seed == 99);
    CHECK(back.exact == true);
    CHECK(j.contains("workers") == false);
}

TEST_CASE("config file application and precedence") {
    const std::string path = temp_path("config.cfg");
    {
        std::ofstream out(path);
        out << "# example config\n";
        out << "process = die\n";
        out << "schedule = lump:6\n";
        out << "paths = 555\n";
        out << "seed = 3\n";
        out << "z-max = 2.5\n";
    }
    RunConfig cfg;
    apply_config_file(path, cfg);
    CHECK(cfg.process == "die");
    CHECK(cfg.schedule == "lump:6");
    CHECK(cfg.paths == 555);
    CHECK(cfg.z_max == 2.5);

    // Piecewise process keys build a process spec.
    {
        std::ofstream out(path);
        out << "kind = gaussian\n";
        out << "mu = 0.05\n";
        out << "sigma = 0.2\n";
    }
    RunConfig cfg2;
    apply_config_file(path, cfg2);
    CHECK(parse_process(cfg2.process).describe() == "gaussian:mu=0.05,sigma=0.2");

    {
        std::ofstream out(path);
        out << "kind = discrete\n";
        out << "values = 1, 2\n";
        out << "probs = 1/2, 1/2\n";
    }
    RunConfig cfg3;
    apply_config_file(path, cfg3);
    CHECK(parse_process(cfg3.process).is_discrete());

    {
        std::ofstream out(path);
        out << "unknown_key = 1\n";
    }
    RunConfig cfg4;
    CHECK_THROWS_AS(apply_config_file(path, cfg4), validation_error);
    std::remove(path.c_str());
}

TEST_CASE("cli: die analytic golden fixture at 12 significant digits") {
    const auto res = run_cli("analytic --process die --schedule lump:6");
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    CHECK(rows.at("E[U]")[1] == "21");
    CHECK(rows.at("E[V]")[1] == "17.5");
    CHECK(rows.at("Var(U)")[1] == "17.5");
    CHECK(rows.at("Var(V)")[1] == "37.3333333333");
    CHECK(rows.at("E1")[1] == "6");

    const auto lines = split_lines(res.output);
    CHECK(lines[0].rfind("# config: {", 0) == 0);
    CHECK(lines[1] == "quantity,value,assumptions,note");
}

TEST_CASE("cli: rational output prints exact fractions") {
    const auto res = run_cli("analytic --process die --schedule lump:6 --rational");
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    CHECK(rows.at("E[U]")[1] == "21");
    CHECK(rows.at("E[V]")[1] == "35/2");
    CHECK(rows.at("Var(U)")[1] == "35/2");
    CHECK(rows.at("Var(V)")[1] == "112/3");
    CHECK(rows.at("E2")[1] == "6");

    const auto dca_res = run_cli("analytic --process die --schedule dca:6 --rational");
    const auto dca_rows = csv_rows(dca_res.output);
    CHECK(dca_rows.at("E2")[1] == "91/36");
    CHECK(dca_rows.at("E4")[1] == "2275/1296");
    CHECK(dca_rows.at("E[V]")[1] == "3185/432"); // (35/12) * (91/36)
}

TEST_CASE("cli: gaussian dca(6) exposure row") {
    const auto res = run_cli("analytic --process gaussian:mu=0,sigma=1 --schedule dca:6");
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    CHECK(rows.at("E2")[1] == "2.52777777778"); // 91/36
    CHECK(rows.at("E[V]")[1] == "2.52777777778");
    CHECK(rows.at("Var(U/E1)")[1] == "0.206349206349"); // 13/63
}

TEST_CASE("cli: compare accepts a single horizon") {
    const auto res = run_cli("compare --process gaussian --schedules lump,dca --t 4");
    REQUIRE(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    REQUIRE(lines.size() == 4); // config + header + 2 rows
    CHECK(split_cells(lines[2])[1] == "4");
}

TEST_CASE("cli: studentt nu=3 emits NA rows with reasons") {
    const auto res = run_cli("analytic --process studentt:nu=3 --schedule lump:5");
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    CHECK(rows.at("Var(V)")[1] == "NA");
    CHECK(rows.at("Var(V)")[3].find("fourth moment") != std::string::npos);
    CHECK(rows.at("E[U]")[1] == "0");
}

TEST_CASE("cli: simulate output is deterministic and worker-invariant") {
    const std::string base =
        "simulate --process die --schedule lump:6 --paths 20000 --seed 1";
    const auto a = run_cli(base + " --workers 1");
    const auto b = run_cli(base + " --workers 4");
    const auto c = run_cli(base + " --workers 8");
    const auto d = run_cli(base + " --workers 4");
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(b.output == c.output);
    CHECK(b.output == d.output);

    const auto rows = csv_rows(a.output);
    const double mean_u = std::stod(rows.at("E[U]")[1]);
    CHECK(std::abs(mean_u - 21.0) < 4.0 * std::sqrt(17.5 / 20000.0));
}

TEST_CASE("cli: simulate writes identical bytes to a file") {
    const std::string out1 = temp_path("sim1.csv");
    const std::string out2 = temp_path("sim2.csv");
    const std::string base =
        "simulate --process gaussian --schedule dca:5 --paths 10000 --seed 77 --out ";
    REQUIRE(run_cli(base + out1 + " --workers 1").exit_code == 0);
    REQUIRE(run_cli(base + out2 + " --workers 3").exit_code == 0);
    std::ifstream f1(out1, std::ios::binary);
    std::ifstream f2(out2, std::ios::binary);
    const std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(!s1.empty());
    CHECK(s1 == s2);
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("cli: simulate with one path is a configuration error") {
    const auto res = run_cli("simulate --process die --schedule lump:6 --paths 1");
    CHECK(res.exit_code == 2);
}

TEST_CASE("cli: verify exit codes") {
    const auto exact = run_cli("verify --process die --schedule dca:3 --exact");
    CHECK(exact.exit_code == 0);
    for (const auto& [q, cells] : csv_rows(exact.output)) {
        CHECK(cells[5] == "pass");
    }

    const auto stat = run_cli(
        "verify --process gaussian --schedule unit:6 --paths 50000 --seed 11");
    CHECK(stat.exit_code == 0);

    const auto bad = run_cli("verify --process ar1:phi=2.0 --schedule lump:2 --paths 100");
    CHECK(bad.exit_code == 2);

    const auto fail = run_cli(
        "verify --process gaussian --schedule lump:4 --paths 2000 --seed 5 --z-max 0.001");
    CHECK(fail.exit_code == 1);

    const auto exact_misuse = run_cli("verify --process gaussian --schedule lump:2 --exact");
    CHECK(exact_misuse.exit_code == 2);
}

TEST_CASE("cli: verify auto-selects the enumeration oracle for small discrete runs") {
    const auto res = run_cli("verify --process die --schedule dca:3");
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    for (const auto& [q, cells] : rows) {
        CHECK(cells[3] == "0"); // std_error column: exact oracle
    }
    // Too many states for enumeration: falls back to Monte Carlo.
    const auto res2 =
        run_cli("verify --process die --schedule lump:12 --paths 20000 --seed 2");
    REQUIRE(res2.exit_code == 0);
    CHECK(csv_rows(res2.output).at("E[U]")[3] != "0");
}

TEST_CASE("cli: studentt nu=3 verify skips Var(V)") {
    const auto res = run_cli(
        "verify --process studentt:nu=3 --schedule lump:5 --paths 20000 --seed 8");
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    CHECK(rows.at("Var(V)")[5] == "skip");
    CHECK(rows.at("Var(V)")[6].find("fourth moment") != std::string::npos);
}

TEST_CASE("cli: compare emits the gap column converging to 1/3") {
    const auto res = run_cli(
        "compare --process gaussian --schedules lump,dca,unit --t 1..50");
    REQUIRE(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    CHECK(lines[1] == "schedule,t,e1,e2,ev,ev_per_e2,var_u_norm,rr,gap");

    double prev_gap = -1.0;
    std::string ev_per_e2;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto cells = split_cells(lines[i]);
        REQUIRE(cells.size() == 9);
        if (cells[1] == "1") {
            // all schedules coincide at t = 1
            CHECK(cells[2] == "1");
            CHECK(cells[3] == "1");
        }
        if (ev_per_e2.empty()) ev_per_e2 = cells[5];
        CHECK(cells[5] == ev_per_e2); // sigma^2, constant across schedules and t
        if (cells[0] == "dca") {
            const double gap = std::stod(cells[8]);
            CHECK(gap >= prev_gap);
            prev_gap = gap;
        }
    }
    CHECK(prev_gap > 0.3);
    CHECK(prev_gap < 1.0 / 3.0 + 1e-12);
}

TEST_CASE("cli: enumerate reports exact moments") {
    const auto res = run_cli("enumerate --process die --schedule lump:2 --rational");
    REQUIRE(res.exit_code == 0);
    const auto rows = csv_rows(res.output);
    CHECK(rows.at("E[U]")[1] == "7");
    CHECK(rows.at("Var(U)")[1] == "35/6");
    CHECK(rows.at("E[V]")[1] == "35/6");
    CHECK(rows.at("Var(V)")[1] == "112/9");

    const auto bad = run_cli("enumerate --process gaussian --schedule lump:2");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("cli: json output embeds the config and rows") {
    const auto res = run_cli("analytic --process die --schedule lump:6 --output json");
    REQUIRE(res.exit_code == 0);
    const auto doc = nlohmann::json::parse(res.output);
    CHECK(doc.contains("config"));
    CHECK(doc.contains("rows"));
    const RunConfig back = config_from_json(doc["config"]);
    CHECK(back.command == "analytic");
    CHECK(parse_process(back.process).is_discrete());

    bool found = false;
    for (const auto& row : doc["rows"]) {
        if (row["quantity"] == "E[U]") {
            CHECK(row["value"] == "21");
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("cli: config file + flag precedence end to end") {
    const std::string path = temp_path("e2e.cfg");
    {
        std::ofstream out(path);
        out << "process = die\n";
        out << "schedule = lump:6\n";
        out << "paths = 444\n";
        out << "seed = 9\n";
    }
    const auto res = run_cli("simulate --config " + path + " --paths 2222");
    REQUIRE(res.exit_code == 0);
    const auto lines = split_lines(res.output);
    const auto config_json = nlohmann::json::parse(lines[0].substr(10));
    CHECK(config_json["paths"] == 2222); // flag wins
    CHECK(config_json["seed"] == 9);     // file value survives
    std::remove(path.c_str());
}

TEST_CASE("cli: dump-paths writes the documented CSV") {
    const std::string dump = temp_path("paths.csv");
    const auto res = run_cli("simulate --process die --schedule lump:2 --paths 3 --seed 4 "
                             "--dump-paths " + dump);
    REQUIRE(res.exit_code == 0);

    std::ifstream in(dump);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "path_index,step,return");
    int data_lines = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            ++data_lines;
            const auto cells = split_cells(line);
            REQUIRE(cells.size() == 3);
            const double r = std::stod(cells[2]);
            CHECK(r >= 1.0);
            CHECK(r <= 6.0);
        }
    }
    CHECK(data_lines == 6); // 3 paths x horizon 2
    std::remove(dump.c_str());
}

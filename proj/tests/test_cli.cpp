// Process-level checks of the command-line tool: exit codes, file outputs,
// manifests, reproducibility. Invoked as: test_cli <path-to-binary>.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int failures = 0;
std::string binary;
fs::path work;

void check(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cerr << "FAILED: " << what << '\n';
  }
}

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  const fs::path out_path = work / "stdout.txt";
  const std::string cmd = binary + " " + args + " > " + out_path.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return {WEXITSTATUS(raw), buffer.str()};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::vector<std::vector<double>> read_csv_matrix(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // row label
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <binary>\n";
    return 1;
  }
  binary = argv[1];
  work = fs::temp_directory_path() / ("cayley_cli_test_" + std::to_string(getpid()));
  fs::create_directories(work);

  write_file(work / "ac.json", R"({"xi": 3, "rates": {"00<-11": 1.0, "11<-00": 1.0}})");
  write_file(work / "diff2.json", R"({"xi": 2, "rates": {"01<-10": 1.0, "10<-01": 1.0}})");
  write_file(work / "diff3.json", R"({"xi": 3, "rates": {"01<-10": 1.0, "10<-01": 1.0}})");
  write_file(work / "ann.json", R"({"xi": 3, "rates": {"00<-11": 1.0}})");
  write_file(work / "badkey.json", R"({"xi": 3, "rates": {"12<-01": 1.0}})");
  write_file(work / "step.json", R"({"step": {"height": 0.3, "radius": 2}})");

  // validate: pass / domain failure / parse failure.
  {
    const RunResult ok = run("validate " + (work / "ac.json").string());
    check(ok.exit_code == 0, "validate autonomous file exits 0");
    check(ok.out.find("residual: 0 -> ok") != std::string::npos, "zero residual printed");

    const RunResult bad = run("validate " + (work / "ann.json").string());
    check(bad.exit_code == 1, "validate non-autonomous file exits 1");
    check(bad.out.find("residual: 1") != std::string::npos, "unit residual printed");

    const RunResult parse = run("validate " + (work / "badkey.json").string());
    check(parse.exit_code == 2, "malformed transition key exits 2");

    const RunResult tol = run("validate --tol 1.5 " + (work / "ann.json").string());
    check(tol.exit_code == 0, "--tol overrides the exact residual gate");
  }

  // coefficients JSON.
  {
    const RunResult r = run("coefficients " + (work / "ac.json").string());
    check(r.exit_code == 0, "coefficients exits 0");
    const json j = json::parse(r.out);
    check(j["alpha"] == 1.0 && j["beta"] == -1.0 && j["gamma"] == 1.0,
          "annihilation+creation coefficients");
    check(j["stationary"] == 0.5, "stationary density 1/2");
    check(j["schema_version"] == 1, "schema version present");

    const json d = json::parse(run("coefficients " + (work / "diff2.json").string()).out);
    check(d["stationary"] == "conserved", "pure diffusion reports conserved");
  }

  // green: identity at t=0, manifest sidecar, chain limit.
  {
    const std::string prefix = (work / "g").string();
    const RunResult r = run("green " + (work / "diff3.json").string() +
                            " --a-max 5 --b-max 5 --times 0 --out " + prefix);
    check(r.exit_code == 0, "green exits 0");
    const auto matrix = read_csv_matrix(prefix + "_t0.csv");
    check(matrix.size() == 6, "green matrix has a_max+1 rows");
    double worst = 0.0;
    for (std::size_t a = 0; a < matrix.size(); ++a) {
      for (std::size_t b = 0; b < matrix[a].size(); ++b) {
        worst = std::max(worst, std::fabs(matrix[a][b] - (a == b ? 1.0 : 0.0)));
      }
    }
    check(worst <= 1e-8, "t=0 grid is the identity matrix");

    const json manifest = json::parse(slurp(prefix + "_t0.csv.manifest.json"));
    check(manifest["command"] == "green" && manifest["schema_version"] == 1,
          "manifest sidecar records the command");
    check(manifest["inputs"]["times"][0] == 0.0, "manifest records inputs");

    // Chain closed form against quadrature on the same grid.
    const std::string qp = (work / "q").string();
    const std::string cp = (work / "c").string();
    run("green " + (work / "diff2.json").string() + " --a-max 6 --b-max 6 --times 1 --out " + qp);
    run("green " + (work / "diff2.json").string() +
        " --a-max 6 --b-max 6 --times 1 --limit chain --out " + cp);
    const auto quad = read_csv_matrix(qp + "_t1.csv");
    const auto chain = read_csv_matrix(cp + "_t1.csv");
    double diff = 0.0;
    for (std::size_t a = 0; a < quad.size(); ++a) {
      for (std::size_t b = 0; b < quad[a].size(); ++b) {
        diff = std::max(diff, std::fabs(quad[a][b] - chain[a][b]));
      }
    }
    check(diff <= 1e-8, "chain limit matches quadrature");

    check(run("green " + (work / "diff3.json").string() + " --times 1 --limit chain")
                  .exit_code == 1,
          "--limit chain rejects xi != 2");

    const RunResult cons = run("green " + (work / "diff3.json").string() +
                               " --a-max 1 --b-max 1 --times 0.5 --check conservation");
    check(cons.out.find("conservation t=0.5") != std::string::npos,
          "conservation check printed");

    const RunResult js = run("green " + (work / "ac.json").string() +
                             " --a-max 2 --b-max 2 --times 0.5 --format json");
    const json records = json::parse(js.out);
    check(records["records"].size() == 9, "json records cover the grid");
    check(records["records"][0].contains("log_prefactor"), "records carry log_prefactor");
  }

  // evolve: step profile at t=0 returns the initial step; solvers agree.
  {
    const RunResult r = run("evolve " + (work / "diff3.json").string() + " --profile " +
                            (work / "step.json").string() +
                            " --times 0,1 --report-a-max 4");
    check(r.exit_code == 0, "evolve exits 0");
    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);
    check(line == "t,a,rho", "evolve CSV header");
    double worst_t0 = 0.0;
    std::vector<double> shell_rho(5, 0.0);
    while (std::getline(ss, line)) {
      std::stringstream row(line);
      std::string t_str, a_str, rho_str;
      std::getline(row, t_str, ',');
      std::getline(row, a_str, ',');
      std::getline(row, rho_str, ',');
      const int a = std::stoi(a_str);
      const double rho = std::stod(rho_str);
      if (t_str == "0") {
        worst_t0 = std::max(worst_t0, std::fabs(rho - (a <= 2 ? 0.3 : 0.0)));
      } else {
        shell_rho[a] = rho;
      }
    }
    check(worst_t0 <= 1e-8, "evolve reproduces the step at t=0");

    const RunResult g = run("evolve " + (work / "diff3.json").string() + " --profile " +
                            (work / "step.json").string() +
                            " --times 1 --solver green --report-a-max 4");
    std::stringstream gs(g.out);
    std::getline(gs, line);
    double cross = 0.0;
    while (std::getline(gs, line)) {
      std::stringstream row(line);
      std::string t_str, a_str, rho_str;
      std::getline(row, t_str, ',');
      std::getline(row, a_str, ',');
      std::getline(row, rho_str, ',');
      cross = std::max(cross, std::fabs(std::stod(rho_str) - shell_rho[std::stoi(a_str)]));
    }
    check(cross <= 1e-6, "shell ODE and spectral solver agree through the CLI");
  }

  // simulate: reproducible across thread counts, summary has a rate.
  {
    const std::string args = "simulate " + (work / "diff3.json").string() +
                             " --depth 3 --init bernoulli:0.4 --runs 400 --seed 11 "
                             "--times 0.5,1 --summary " +
                             (work / "sum.json").string() + " --out ";
    run(args + (work / "s1.csv").string() + " --threads 1");
    run(args + (work / "s4.csv").string() + " --threads 4");
    check(slurp(work / "s1.csv") == slurp(work / "s4.csv"),
          "simulate output is bit-identical across thread counts");
    const json summary = json::parse(slurp(work / "sum.json"));
    check(summary["events_per_second"].get<double>() > 0.0, "summary reports events/second");
    check(summary["total_events"].get<std::uint64_t>() > 0, "summary reports total events");
  }

  // oracle with witness on an autonomous model.
  {
    const RunResult r = run("oracle " + (work / "ac.json").string() +
                            " --depth 1 --init bernoulli:0.5 --times 0.5,1 --witness --out " +
                            (work / "oracle.csv").string());
    check(r.exit_code == 0, "oracle exits 0");
    const json w = json::parse(r.out);
    check(w["max_gap"].get<double>() <= 1e-6, "closure gap below 1e-6");
    check(slurp(work / "oracle.csv").rfind("t,site,shell,mean", 0) == 0, "oracle CSV header");
  }

  // asymptotics emits the crossover time and the log columns.
  {
    const RunResult r =
        run("asymptotics " + (work / "diff3.json").string() + " --times 50,100");
    check(r.exit_code == 0, "asymptotics exits 0");
    check(r.out.find("crossover time t_c = 8.32547") != std::string::npos,
          "crossover time printed");
    check(r.out.find("t,log_green,log_large_time,log_large_xi") != std::string::npos,
          "asymptotics CSV header");
  }

  // compare: canonical three-solver scenario, refusal, empty report.
  {
    write_file(work / "scenario.json", R"({
      "solvers": ["green", "shell", "site"],
      "init": {"step": {"height": 0.3, "radius": 2}},
      "times": [1.0],
      "depth": 12,
      "report_a_max": 8,
      "tolerances": {"deterministic": 1e-6}
    })");
    const RunResult r =
        run("compare " + (work / "diff3.json").string() + " " +
            (work / "scenario.json").string());
    check(r.exit_code == 0, "three deterministic solvers agree");
    check(r.out.find("FAIL") == std::string::npos, "no failing pair");
    check(r.out.find("green vs shell") != std::string::npos, "pairs listed");

    write_file(work / "shallow.json", R"({
      "solvers": ["green", "site"],
      "init": {"step": {"height": 0.3, "radius": 2}},
      "times": [1.0],
      "depth": 8,
      "report_a_max": 8
    })");
    const RunResult refused = run("compare " + (work / "diff3.json").string() + " " +
                                  (work / "shallow.json").string());
    check(refused.out.find("SKIPPED (boundary reachable") != std::string::npos,
          "shallow tree comparison is refused with a reason");

    write_file(work / "empty.json", R"({"solvers": [], "times": []})");
    const RunResult empty = run("compare " + (work / "diff3.json").string() + " " +
                                (work / "empty.json").string());
    check(empty.exit_code == 0 && empty.out.find("empty scenario") != std::string::npos,
          "empty scenario exits 0 with an empty report");
  }

  // usage errors.
  {
    check(run("green " + (work / "diff3.json").string()).exit_code == 2,
          "missing required --times exits 2");
    check(run("nonsense").exit_code == 2, "unknown subcommand exits 2");
    check(run("green " + (work / "diff3.json").string() + " --times 2,1").exit_code == 2,
          "descending times exit 2");
  }

  // config file defaults lose to explicit flags.
  {
    write_file(work / "defaults.ini", "[green]\na-max=1\nb-max=1\ntimes=0\n");
    const RunResult from_config = run("--config " + (work / "defaults.ini").string() +
                                      " green " + (work / "diff3.json").string());
    check(from_config.exit_code == 0, "config file supplies required options");
    check(from_config.out.find("a\\b,0,1\n") != std::string::npos,
          "config file sets the grid size");
    const RunResult overridden = run("--config " + (work / "defaults.ini").string() +
                                     " green " + (work / "diff3.json").string() +
                                     " --a-max 2 --b-max 2");
    check(overridden.out.find("a\\b,0,1,2\n") != std::string::npos,
          "explicit flags beat the config file");
  }

  fs::remove_all(work);
  if (failures == 0) {
    std::cout << "test_cli: all checks passed\n";
    return 0;
  }
  std::cout << "test_cli: " << failures << " check(s) failed\n";
  return 1;
}

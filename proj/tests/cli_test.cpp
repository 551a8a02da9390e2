// Copyright 2026 The mtc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mtc/plan.hpp"
#include "mtc/rng.hpp"
#include "mtc/xeb.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "mtc_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::path p = work_dir() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  fs::path out = work_dir() / "stdout.txt";
  fs::path err = work_dir() / "stderr.txt";
  std::string cmd = std::string(MTC_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2> " + err.string();
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

const char* kFig7 = "3\n0 h 0\n0 t 2\n1 cx 0 1\n2 cx 1 2\n3 h 0\n3 h 1\n";
const char* kFig7Plan = "(((0 3) (1 5)) ((2 4) (6 8))) 7\nslice:\n";

std::vector<std::array<double, 2>> parse_amp_rows(const std::string& tsv,
                                                  std::vector<std::string>* bits
                                                  = nullptr) {
  std::vector<std::array<double, 2>> rows;
  std::istringstream ss(tsv);
  std::string b;
  double re, im;
  while (ss >> b >> re >> im) {
    rows.push_back({re, im});
    if (bits) bits->push_back(b);
  }
  return rows;
}

}  // namespace

TEST_CASE("cli: amplitudes on the worked example") {
  fs::path circuit = write_file("fig7.txt", kFig7);
  fs::path plan = write_file("fig7_plan.txt", kFig7Plan);
  fs::path samples = write_file("samples.txt", "000\n100\n111\n");
  RunResult r = run_cli("amplitudes -c " + circuit.string() + " -s " +
                        samples.string() + " -p " + plan.string());
  REQUIRE(r.code == 0);
  auto rows = parse_amp_rows(r.out);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row[0] == doctest::Approx(0.35355339059).epsilon(1e-9));
    CHECK(std::abs(row[1]) < 1e-12);
  }
}

TEST_CASE("cli: batch samples expand in row-major batch-leg order") {
  fs::path circuit = write_file("fig7b.txt", kFig7);
  fs::path plan = write_file("fig7b_plan.txt", kFig7Plan);
  fs::path samples = write_file("batch.txt", "0*0\n");
  RunResult r = run_cli("amplitudes -c " + circuit.string() + " -s " +
                        samples.string() + " -p " + plan.string());
  REQUIRE(r.code == 0);
  std::vector<std::string> bits;
  auto rows = parse_amp_rows(r.out, &bits);
  REQUIRE(rows.size() == 2);
  CHECK(bits == std::vector<std::string>{"000", "010"});
}

TEST_CASE("cli: empty sample file yields empty output and success") {
  fs::path circuit = write_file("fig7c.txt", kFig7);
  fs::path plan = write_file("fig7c_plan.txt", kFig7Plan);
  fs::path samples = write_file("none.txt", "");
  RunResult r = run_cli("amplitudes -c " + circuit.string() + " -s " +
                        samples.string() + " -p " + plan.string());
  CHECK(r.code == 0);
  CHECK(r.out.empty());
}

TEST_CASE("cli: the q0-last bit order flips both input and output") {
  fs::path circuit = write_file("fig7d.txt", kFig7);
  fs::path plan = write_file("fig7d_plan.txt", kFig7Plan);
  // "011" with qubit 0 last means q0=1, q1=1, q2=0.
  fs::path samples = write_file("rev.txt", "011\n");
  RunResult r = run_cli("amplitudes --bit-order q0-last -c " +
                        circuit.string() + " -s " + samples.string() + " -p " +
                        plan.string());
  REQUIRE(r.code == 0);
  std::vector<std::string> bits;
  auto rows = parse_amp_rows(r.out, &bits);
  REQUIRE(rows.size() == 1);
  CHECK(bits[0] == "011");
  // <110|C|000> = +1/(2*sqrt(2)) for this circuit, unlike <011|.
  CHECK(rows[0][0] == doctest::Approx(0.35355339059).epsilon(1e-9));
}

TEST_CASE("cli: optimize is deterministic and --steps 0 keeps the chain") {
  fs::path circuit = write_file("fig7e.txt", kFig7);
  fs::path p1 = work_dir() / "p1.txt";
  fs::path p2 = work_dir() / "p2.txt";
  std::string flags = " --steps 400 --seed 9 -k 3 --slice-interval 200";
  REQUIRE(run_cli("optimize -c " + circuit.string() + " -o " + p1.string() +
                  flags)
              .code == 0);
  REQUIRE(run_cli("optimize -c " + circuit.string() + " -o " + p2.string() +
                  flags)
              .code == 0);
  CHECK(slurp(p1) == slurp(p2));

  fs::path p0 = work_dir() / "p0.txt";
  REQUIRE(run_cli("optimize -c " + circuit.string() + " -o " + p0.string() +
                  " --steps 0")
              .code == 0);
  CHECK(slurp(p0) == format_plan(mtc::left_deep_plan(9)));

  // The optimized plan still reproduces the amplitudes.
  fs::path samples = write_file("samples_e.txt", "000\n111\n");
  RunResult amp = run_cli("amplitudes -c " + circuit.string() + " -s " +
                          samples.string() + " -p " + p1.string());
  REQUIRE(amp.code == 0);
  auto rows = parse_amp_rows(amp.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == doctest::Approx(0.35355339059).epsilon(1e-9));
}

TEST_CASE("cli: emulate prints the per-node table") {
  fs::path circuit = write_file("fig7f.txt", kFig7);
  fs::path plan = write_file("fig7f_plan.txt", kFig7Plan);
  fs::path samples = write_file("samples_f.txt", "000\n100\n111\n");
  RunResult r = run_cli("emulate -c " + circuit.string() + " -s " +
                        samples.string() + " -p " + plan.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("exact peak bytes") != std::string::npos);
  CHECK(r.out.find("k_bound") != std::string::npos);
  CHECK(r.out.find("predicted flops (C)  105") != std::string::npos);
}

TEST_CASE("cli: xeb modes") {
  SUBCASE("uniform probabilities score zero") {
    std::string probs;
    for (int i = 0; i < 64; ++i) probs += "0.00390625\n";  // 2^-8
    fs::path f = write_file("uniform.txt", probs);
    RunResult r = run_cli("xeb -i " + f.string() + " -n 8");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("F_XEB         0 ") != std::string::npos);
  }
  SUBCASE("per-instance summary rounds the mean to two decimals") {
    fs::path f = write_file(
        "inst.txt",
        "0.0062\n0.0056\n0.0063\n0.0055\n0.0068\n0.0051\n0.0058\n0.0053\n"
        "0.0062\n0.0070\n");
    RunResult r = run_cli("xeb -i " + f.string() +
                          " --instances --samples-per-instance 2000000");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("0.60%") != std::string::npos);
  }
  SUBCASE("amplitude TSV input infers the qubit count") {
    fs::path f = write_file("amps.tsv",
                            "000\t0.3535533905932738\t0\n"
                            "111\t-0.3535533905932738\t0\n");
    RunResult r = run_cli("xeb -i " + f.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("qubits        3") != std::string::npos);
  }
}

TEST_CASE("cli: optimize -> amplitudes -> xeb reproduces the exact fidelity") {
  using namespace mtc;
  Circuit c = test::grid_circuit(2, 3, 5, 31337);
  fs::path circuit = write_file("grid23.txt", format_circuit(c));

  // Samples drawn from the circuit's exact output distribution.
  std::vector<double> dist =
      probs_from_amplitudes(test::oracle_all_amplitudes(c));
  double target = -1.0;
  for (double p : dist) target += 64.0 * p * p;
  std::vector<double> cumulative(dist.size());
  double acc = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += dist[i];
    cumulative[i] = acc;
  }
  const int k = 20000;
  Rng rng(5);
  std::string sample_text;
  for (int i = 0; i < k; ++i) {
    double u = rng.uniform_real01() * acc;
    std::size_t idx =
        std::lower_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin();
    sample_text += test::bitstring_of_index(std::min(idx, dist.size() - 1), 6);
    sample_text += "\n";
  }
  fs::path samples = write_file("grid23_samples.txt", sample_text);

  fs::path plan = work_dir() / "grid23_plan.txt";
  REQUIRE(run_cli("optimize -c " + circuit.string() + " -o " + plan.string() +
                  " --steps 30000 --seed 3 -k 64")
              .code == 0);
  fs::path amps = work_dir() / "grid23_amps.tsv";
  REQUIRE(run_cli("amplitudes -c " + circuit.string() + " -s " +
                  samples.string() + " -p " + plan.string() + " -o " +
                  amps.string())
              .code == 0);
  fs::path report = work_dir() / "grid23_xeb.tsv";
  RunResult r =
      run_cli("xeb -i " + amps.string() + " -o " + report.string());
  REQUIRE(r.code == 0);

  // Pull f_xeb out of the TSV report.
  std::istringstream tsv(slurp(report));
  std::string key;
  double f_xeb = -99, value;
  while (tsv >> key >> value)
    if (key == "f_xeb") f_xeb = value;
  double sigma = 1.0 / std::sqrt(static_cast<double>(k));
  CHECK(std::abs(f_xeb - target) < 5.0 * sigma);
}

TEST_CASE("cli: exit codes distinguish usage, data, and resource errors") {
  fs::path circuit = write_file("fig7g.txt", kFig7);
  fs::path plan = write_file("fig7g_plan.txt", kFig7Plan);
  fs::path samples = write_file("samples_g.txt", "000\n");

  SUBCASE("usage: missing file") {
    RunResult r = run_cli("amplitudes -c /nonexistent.txt -s " +
                          samples.string() + " -p " + plan.string());
    CHECK(r.code == 1);
  }
  SUBCASE("usage: unknown flag") {
    CHECK(run_cli("optimize --frobnicate").code == 1);
  }
  SUBCASE("data: malformed circuit reports the line") {
    fs::path bad = write_file("bad.txt", "3\n0 h 0\n0 frob 1\n");
    RunResult r = run_cli("amplitudes -c " + bad.string() + " -s " +
                          samples.string() + " -p " + plan.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
  }
  SUBCASE("data: malformed xeb input reports the line") {
    fs::path bad = write_file("badprobs.txt", "0.5\npotato\n");
    RunResult r = run_cli("xeb -i " + bad.string() + " -n 2");
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
  }
  SUBCASE("resource: memory cap") {
    RunResult r = run_cli("amplitudes --memory-cap 128 -c " +
                          circuit.string() + " -s " + samples.string() +
                          " -p " + plan.string());
    CHECK(r.code == 3);
    CHECK(r.err.find("memory cap exceeded") != std::string::npos);
  }
}

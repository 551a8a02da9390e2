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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtc/circuit.hpp"
#include "mtc/diagram.hpp"
#include "mtc/errors.hpp"
#include "mtc/formats.hpp"
#include "mtc/multieval.hpp"
#include "mtc/optimizer.hpp"
#include "mtc/plan.hpp"
#include "mtc/xeb.hpp"

namespace {

using namespace mtc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitResource = 3;

std::string u128_str(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

struct CommonFlags {
  std::string circuit_path;
  std::string samples_path;
  std::string plan_path;
  std::string output_path;
  bool fuse = false;
  std::string bit_order = "q0-first";
  int workers = 1;
  std::uint64_t memory_cap = 8ull << 30;

  BitOrder order() const {
    return bit_order == "q0-last" ? BitOrder::kQubit0Last
                                  : BitOrder::kQubit0First;
  }
};

struct CostFlags {
  double alpha = 16.0;
  double beta = 8.0;
  std::uint64_t mem_budget = 8ull << 30;
  double p = 4.0;
  std::uint64_t k = 1;

  CostConfig config() const {
    CostConfig cfg;
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.m_max = mem_budget;
    cfg.p = p;
    cfg.k = k;
    return cfg;
  }
};

void add_cost_flags(CLI::App* cmd, CostFlags& cf) {
  cmd->add_option("--alpha", cf.alpha, "Arithmetic intensity")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--beta", cf.beta, "Out-of-memory penalty factor")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--mem-budget", cf.mem_budget, "Memory budget in bytes")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--p-norm", cf.p, "Memory-norm exponent (>= 1)")
      ->check(CLI::Range(1.0, 1024.0));
  cmd->add_option("-k,--requests", cf.k,
                  "Number of amplitude requests the plan is costed for")
      ->check(CLI::PositiveNumber);
}

// Batch legs are the '*' columns of the samples; every line must agree.
std::vector<LegId> batch_legs_of(const NetworkDiagram& d,
                                 const std::vector<std::string>& samples) {
  std::vector<LegId> legs;
  if (samples.empty()) return legs;
  const std::string& first = samples.front();
  if (first.size() != static_cast<std::size_t>(d.n_qubits))
    throw DataError("bitstring length " + std::to_string(first.size()) +
                    " does not match the " + std::to_string(d.n_qubits) +
                    "-qubit circuit");
  for (std::size_t q = 0; q < first.size(); ++q)
    if (first[q] == '*') legs.push_back(d.open_legs[q]);
  return legs;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write to " + path);
  out << text;
}

int cmd_optimize(const CommonFlags& common, const CostFlags& cost,
                 const SearchConfig& sc) {
  Circuit circuit = parse_circuit_file(common.circuit_path);
  NetworkDiagram d = to_diagram(circuit, common.fuse);
  CostConfig cfg = cost.config();
  ValueCounts counts = bound_value_counts(d, {}, cfg.k);
  AnnealResult result = anneal(d, counts, cfg, sc);
  write_text(common.output_path, format_plan(result.plan));

  std::ostringstream s;
  s << "slots            " << d.slot_count() << "\n"
    << "steps            " << sc.steps << " x " << sc.chains << " chain(s)\n"
    << "cost (C)         " << u128_str(result.total_cost) << "\n"
    << "rw               " << u128_str(result.total_rw) << "\n"
    << "memory estimate  " << static_cast<std::uint64_t>(
                                  result.memory_estimate_bytes) << " bytes\n"
    << "objective f      " << result.objective << "\n"
    << "sliced legs      " << result.plan.sliced.size() << "\n";
  std::cerr << s.str();
  return kExitOk;
}

int cmd_amplitudes(const CommonFlags& common) {
  Circuit circuit = parse_circuit_file(common.circuit_path);
  NetworkDiagram d = to_diagram(circuit, common.fuse);
  std::vector<std::string> samples =
      read_samples_file(common.samples_path, common.order());
  Plan plan = parse_plan_file(common.plan_path);

  std::ostringstream out;
  if (!samples.empty()) {
    std::vector<LegId> batch = batch_legs_of(d, samples);
    AssignmentSet as = build_assignments(d, samples, batch);
    EvalOptions opts;
    opts.memory_cap_bytes = common.memory_cap;
    opts.workers = common.workers;
    EvalResult r = plan.sliced.empty() ? eval_all(plan, d, as, opts)
                                       : eval_sliced(plan, d, as, opts);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Tensor& t = r.values[i];
      if (batch.empty()) {
        out << format_amplitude_row(samples[i], t.data()[0], common.order());
        continue;
      }
      // Expand '*' positions in row-major order of the batch legs.
      std::vector<int> positions;
      for (const Leg& l : t.legs()) positions.push_back(d.qubit_of(l.id));
      for (std::uint64_t v = 0; v < t.size(); ++v) {
        std::string bits = samples[i];
        std::uint64_t rest = v;
        for (std::size_t j = positions.size(); j-- > 0;) {
          bits[positions[j]] = (rest & 1) ? '1' : '0';
          rest >>= 1;
        }
        out << format_amplitude_row(bits, t.data()[v], common.order());
      }
    }
  }
  write_text(common.output_path, out.str());
  return kExitOk;
}

int cmd_emulate(const CommonFlags& common, const CostFlags& cost) {
  Circuit circuit = parse_circuit_file(common.circuit_path);
  NetworkDiagram d = to_diagram(circuit, common.fuse);
  std::vector<std::string> samples =
      read_samples_file(common.samples_path, common.order());
  Plan plan = parse_plan_file(common.plan_path);
  std::vector<LegId> batch = batch_legs_of(d, samples);
  AssignmentSet as = build_assignments(d, samples, batch);

  EvalOptions opts;
  opts.memory_cap_bytes = common.memory_cap;
  EmulateResult em = emulate(plan, d, as, opts);

  CostConfig cfg = cost.config();
  cfg.k = std::max<std::uint64_t>(as.request_count(), 1);
  CostedPlan exact(plan, d, cfg, exact_value_counts(as), &as);
  CostedPlan bound(plan, d, cfg, bound_value_counts(d, batch, cfg.k));

  std::ostringstream s;
  s << "requests             " << as.request_count() << "\n"
    << "predicted mults      " << u128_str(exact.total_mults()) << "\n"
    << "predicted adds       " << u128_str(exact.total_adds()) << "\n"
    << "predicted flops (C)  " << u128_str(exact.total_cost()) << "\n"
    << "predicted rw         " << u128_str(exact.total_rw()) << "\n"
    << "emulated mults       " << em.counters.mults << "\n"
    << "emulated adds        " << em.counters.adds << "\n"
    << "emulated rw          " << em.counters.rw << "\n"
    << "exact peak bytes     " << em.peak_bytes << "\n"
    << "memory estimate (M)  "
    << static_cast<std::uint64_t>(exact.memory_estimate_bytes()) << " bytes\n"
    << "slice multiplicity   " << exact.slice_multiplicity() << "\n";
  s << "\nnode  expr          k_bound  k_t  evals  size  cost  rw\n";
  for (std::size_t n = 0; n < plan.nodes.size(); ++n) {
    const Plan::Node& nd = plan.nodes[n];
    const NodeAnnotation& a = exact.node(static_cast<int>(n));
    std::string expr = nd.leaf() ? "slot " + std::to_string(nd.slot)
                                 : "n" + std::to_string(nd.left) + "*n" +
                                       std::to_string(nd.right);
    s << n << "\t" << expr << "\t" << bound.node(static_cast<int>(n)).k_t
      << "\t" << a.k_t << "\t" << em.node_contractions[n] << "\t" << a.size
      << "\t" << a.mults + a.adds << "\t" << a.rw << "\n";
  }
  write_text(common.output_path, s.str());
  return kExitOk;
}

int cmd_xeb(const std::string& input_path, int n, std::uint64_t k_override,
            bool instances, std::uint64_t samples_per_instance,
            const std::string& output_path) {
  std::ifstream in(input_path);
  if (!in) throw DataError("cannot open input file: " + input_path);

  XebReport report;
  if (instances) {
    std::vector<double> values = read_probabilities(in);
    report = summarize(values, samples_per_instance);
  } else {
    if (n <= 0) {
      // Try to infer n from an amplitude TSV.
      std::ifstream probe(input_path);
      std::vector<AmplitudeRow> rows =
          read_amplitude_tsv(probe, BitOrder::kQubit0First);
      if (!rows.empty()) n = static_cast<int>(rows.front().bitstring.size());
    }
    if (n <= 0)
      throw DataError("qubit count required (-n) for probability input");
    std::vector<double> probs = read_probabilities(in);
    report.n = n;
    report.k = k_override ? k_override : probs.size();
    report.f_xeb = linear_xeb(n, probs);
    report.mean = report.f_xeb;
    report.sigma = 1.0 / std::sqrt(static_cast<double>(report.k));
  }
  std::cout << format_report(report);
  if (!output_path.empty()) write_text(output_path, format_report_tsv(report));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mtc: multi-tensor contraction of quantum circuit amplitudes with "
      "contraction-tree annealing and linear-XEB reporting"};
  app.require_subcommand(1);

  CommonFlags common;
  CostFlags cost;
  SearchConfig sc;

  auto add_common_io = [&](CLI::App* cmd, bool needs_samples,
                           bool needs_plan) {
    cmd->add_option("-c,--circuit", common.circuit_path, "Circuit file")
        ->required()
        ->check(CLI::ExistingFile);
    if (needs_samples)
      cmd->add_option("-s,--samples", common.samples_path,
                      "Bitstring sample file ('*' marks batch positions)")
          ->required()
          ->check(CLI::ExistingFile);
    if (needs_plan)
      cmd->add_option("-p,--plan", common.plan_path, "Plan file")
          ->required()
          ->check(CLI::ExistingFile);
    cmd->add_flag("--fuse", common.fuse,
                  "Absorb single-qubit gates into neighbouring gates");
    cmd->add_option("--bit-order", common.bit_order,
                    "Bitstring convention: q0-first (default) or q0-last")
        ->check(CLI::IsMember({"q0-first", "q0-last"}));
  };

  CLI::App* opt = app.add_subcommand(
      "optimize", "Anneal a contraction plan for a circuit");
  add_common_io(opt, false, false);
  opt->add_option("-o,--output", common.output_path, "Plan file to write")
      ->required();
  add_cost_flags(opt, cost);
  opt->add_option("--steps", sc.steps, "Rewrite attempts per chain");
  opt->add_option("--temp-init", sc.temp_init, "Initial temperature")
      ->check(CLI::NonNegativeNumber);
  opt->add_option("--temp-final", sc.temp_final, "Final temperature")
      ->check(CLI::NonNegativeNumber);
  opt->add_option("--decay", sc.decay,
                  "Geometric temperature decay per step (0 = derive)");
  opt->add_option("--slice-interval", sc.slice_interval,
                  "Steps between slicing moves")
      ->check(CLI::PositiveNumber);
  opt->add_option("--seed", sc.seed, "Annealing seed");
  opt->add_option("--chains", sc.chains, "Independent restarts")
      ->check(CLI::PositiveNumber);

  CLI::App* amp = app.add_subcommand(
      "amplitudes", "Evaluate amplitudes or batches for sampled bitstrings");
  add_common_io(amp, true, true);
  amp->add_option("-o,--output", common.output_path,
                  "Output TSV (default: stdout)");
  amp->add_option("--workers", common.workers, "Slice executors")
      ->check(CLI::PositiveNumber);
  amp->add_option("--memory-cap", common.memory_cap,
                  "Resident tensor memory cap in bytes");

  CLI::App* emu = app.add_subcommand(
      "emulate", "Shape-only replay: exact costs and peak memory");
  add_common_io(emu, true, true);
  emu->add_option("-o,--output", common.output_path,
                  "Report file (default: stdout)");
  emu->add_option("--memory-cap", common.memory_cap,
                  "Resident tensor memory cap in bytes");
  add_cost_flags(emu, cost);

  std::string xeb_input, xeb_output;
  int xeb_n = 0;
  std::uint64_t xeb_k = 0, xeb_spi = 0;
  bool xeb_instances = false;
  CLI::App* xeb = app.add_subcommand(
      "xeb", "Linear XEB fidelity from amplitudes or probabilities");
  xeb->add_option("-i,--input", xeb_input,
                  "Amplitude TSV or probability file")
      ->required()
      ->check(CLI::ExistingFile);
  xeb->add_option("-n,--qubits", xeb_n, "Qubit count");
  xeb->add_option("--samples", xeb_k,
                  "Sample count for sigma (default: input rows)");
  xeb->add_flag("--instances", xeb_instances,
                "Input holds per-instance fidelities; report their mean");
  xeb->add_option("--samples-per-instance", xeb_spi,
                  "Sample count behind each instance fidelity");
  xeb->add_option("-o,--output", xeb_output, "Report TSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(opt)) return cmd_optimize(common, cost, sc);
    if (app.got_subcommand(amp)) return cmd_amplitudes(common);
    if (app.got_subcommand(emu)) return cmd_emulate(common, cost);
    if (app.got_subcommand(xeb)) {
      if (xeb_instances && xeb_spi == 0) {
        std::cerr << "error: --instances requires --samples-per-instance\n";
        return kExitUsage;
      }
      return cmd_xeb(xeb_input, xeb_n, xeb_k, xeb_instances, xeb_spi,
                     xeb_output);
    }
  } catch (const MemoryCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kExitResource;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

// qsmpc: command-line driver for the symmetric-function protocol simulator.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qsmpc/experiment.hpp"
#include "qsmpc/transcript_io.hpp"

namespace {

using namespace qsmpc;

BitVector parse_bits(const std::string& text, const char* what) {
  BitVector out;
  std::stringstream ss(text);
  for (std::string cell; std::getline(ss, cell, ',');) {
    const auto t = detail::trim(cell);
    if (t != "0" && t != "1") throw DomainError(std::string(what) + ": expected comma-separated bits, got '" + text + "'");
    out.push_back(t == "1" ? 1 : 0);
  }
  if (out.empty()) throw DomainError(std::string(what) + ": empty bit vector");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::string histogram_json(const std::map<std::string, std::uint64_t>& h) { return nlohmann::json(h).dump(2) + "\n"; }

struct CaseOptions {
  std::string name;
  int n = 0;
  std::vector<int> ks;
  std::string x;
  std::string r;
  int shots = kDefaultShots;
  double noise_p = 0.0;
  double meas_flip = 0.0;
  std::uint64_t seed = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--case", name, "Built-in case: n5, n8 or n10 (omit for a custom case)");
    cmd->add_option("--n", n, "Number of clients (custom case)");
    cmd->add_option("--k", ks, "Moduli to evaluate, e.g. --k 2 3 4 (custom case)")->delimiter(',');
    cmd->add_option("--x", x, "Private inputs, comma-separated bits (custom case)");
    cmd->add_option("--r", r, "Mask bits, comma-separated (custom case)");
    cmd->add_option("--shots", shots, "Protocol runs per k")->check(CLI::PositiveNumber);
    cmd->add_option("--meas-flip", meas_flip, "Readout flip probability")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", seed, "Master seed");
  }

  ExperimentCase build() const {
    ExperimentCase c;
    if (!name.empty()) {
      c = builtin_case(name);
      if (n != 0 || !ks.empty() || !x.empty() || !r.empty())
        throw DomainError("--case cannot be combined with --n, --k, --x or --r");
    } else {
      if (n == 0 || ks.empty() || x.empty() || r.empty())
        throw DomainError("custom case needs --n, --k, --x and --r (or use --case)");
      c.n = n;
      c.ks = ks;
      c.x = parse_bits(x, "--x");
      c.r = parse_bits(r, "--r");
    }
    c.shots = shots;
    c.seed = seed;
    c.noise = {noise_p, meas_flip};
    c.validate();
    return c;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Simulator for secure multiparty computation of symmetric Boolean functions with one travelling qubit"};
  app.require_subcommand(1);

  // reproduce
  CaseOptions rep_opts;
  std::string rep_out;
  std::string rep_reference;
  auto* rep = app.add_subcommand("reproduce", "Run a case for every k and tabulate correct outputs");
  rep_opts.add_to(rep);
  rep->add_option("--noise-p", rep_opts.noise_p, "Depolarizing probability per gate")->check(CLI::Range(0.0, 1.0));
  rep->add_option("--out", rep_out, "Directory for table.csv, histogram.json and announcements.json");
  rep->add_option("--reference", rep_reference, "Hardware reference CSV to show alongside the table");

  // compute
  int comp_n = 0, comp_k = 0;
  std::string comp_x, comp_r, comp_out;
  std::uint64_t comp_seed = 1;
  double comp_p = 0.0, comp_flip = 0.0;
  auto* comp = app.add_subcommand("compute", "Run the protocol once and summarize the transcript");
  comp->add_option("--n", comp_n, "Number of clients")->required();
  comp->add_option("--k", comp_k, "Modulus k, 2 <= k <= n")->required();
  comp->add_option("--x", comp_x, "Private inputs, comma-separated bits")->required();
  comp->add_option("--r", comp_r, "Mask bits, comma-separated")->required();
  comp->add_option("--seed", comp_seed, "Master seed");
  comp->add_option("--noise-p", comp_p, "Depolarizing probability per gate")->check(CLI::Range(0.0, 1.0));
  comp->add_option("--meas-flip", comp_flip, "Readout flip probability")->check(CLI::Range(0.0, 1.0));
  comp->add_option("--out", comp_out, "Write the full transcript to this file");

  // noise-sweep
  CaseOptions sw_opts;
  std::vector<double> sw_grid{0.0, 0.005, 0.01, 0.02};
  std::string sw_out;
  auto* sw = app.add_subcommand("noise-sweep", "Correct-output frequency versus depolarizing strength");
  sw_opts.add_to(sw);
  sw->add_option("--noise-p", sw_grid, "Probability grid, e.g. --noise-p 0,0.01,0.02")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  sw->add_option("--out", sw_out, "Write the CSV to this file instead of stdout");

  // security-audit
  int sec_n = 0, sec_k = 0;
  auto* sec = app.add_subcommand("security-audit", "Exact eavesdropper and collusion analysis");
  sec->add_option("--n", sec_n, "Number of clients (<= 6; collusion analysis needs <= 5)")->required();
  sec->add_option("--k", sec_k, "Modulus k")->required();

  // emit-circuit
  int em_n = 0;
  std::vector<int> em_ks;
  std::string em_x, em_r, em_case, em_format = "paper-notation", em_out;
  auto* em = app.add_subcommand("emit-circuit", "Print the masked rotation circuit");
  em->add_option("--case", em_case, "Built-in case supplying n, x, r and the k list");
  em->add_option("--n", em_n, "Number of clients");
  em->add_option("--k", em_ks, "Moduli (one circuit each)")->delimiter(',');
  em->add_option("--x", em_x, "Private inputs, comma-separated bits");
  em->add_option("--r", em_r, "Mask bits, comma-separated");
  em->add_option("--format", em_format, "paper-notation or qasm");
  em->add_option("--out", em_out, "Write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (rep->parsed()) {
    const auto c = rep_opts.build();
    const auto res = reproduce(c);
    ReferenceColumn ref;
    if (!rep_reference.empty()) ref = parse_reference_csv(read_file(rep_reference));
    std::cout << "case " << c.name << " n=" << c.n << " shots=" << c.shots << " seed=" << c.seed
              << " mask parity=" << int{res.mask_parity} << "\n";
    std::cout << table_text(res.table, rep_reference.empty() ? nullptr : &ref);
    std::cout << "output histogram (largest k first):\n";
    for (const auto& [tuple, count] : res.histogram) std::cout << "  " << tuple << " occurred " << count << " times\n";
    if (!rep_out.empty()) {
      std::filesystem::create_directories(rep_out);
      const std::filesystem::path dir(rep_out);
      write_file(dir / "table.csv", table_csv(res.table));
      write_file(dir / "histogram.json", histogram_json(res.histogram));
      write_file(dir / "announcements.json", histogram_json(res.announcements));
    }
    return 0;
  }

  if (comp->parsed()) {
    const ProtocolSetup setup{comp_n, comp_k, parse_bits(comp_x, "--x"), parse_bits(comp_r, "--r"), comp_seed,
                              {comp_p, comp_flip}};
    setup.validate();
    const auto t = run_protocol(setup);
    std::cout << compute_report(t);
    if (!comp_out.empty()) write_file(comp_out, serialize(t));
    return 0;
  }

  if (sw->parsed()) {
    const auto c = sw_opts.build();
    const auto res = noise_sweep(c, sw_grid);
    if (sw_out.empty()) {
      std::cout << sweep_csv(res);
    } else {
      write_file(sw_out, sweep_csv(res));
    }
    std::cerr << sweep_report(res);
    return res.monotone() ? 0 : 3;
  }

  if (sec->parsed()) {
    const auto a = security_audit(sec_n, sec_k);
    std::cout << security_report(a);
    return a.passed() ? 0 : 3;
  }

  if (em->parsed()) {
    const auto format = parse_circuit_format(em_format);
    int n = em_n;
    std::vector<int> ks = em_ks;
    BitVector x, r;
    if (!em_case.empty()) {
      const auto c = builtin_case(em_case);
      n = c.n;
      x = c.x;
      r = c.r;
      if (ks.empty()) ks = c.ks;
    } else {
      if (n == 0 || ks.empty() || em_x.empty() || em_r.empty())
        throw DomainError("emit-circuit needs --n, --k, --x and --r (or --case)");
      x = parse_bits(em_x, "--x");
      r = parse_bits(em_r, "--r");
    }
    const auto text = emit_circuits(n, ks, x, r, format);
    if (em_out.empty()) {
      std::cout << text;
    } else {
      write_file(em_out, text);
    }
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

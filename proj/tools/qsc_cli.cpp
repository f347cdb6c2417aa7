#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qsc/parallel.hpp"

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qsc;
  CLI::App app{"Quantum stochastic calculus checks on truncated chain spaces"};
  app.require_subcommand(1);

  std::string input, output, csv;
  double tol = 0.0, t = 0.0;
  std::uint64_t seed = 0;
  bool deterministic = false;
  for (const auto& name : cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--input", input, "JSON spec")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", output, "JSON report path")->required();
    sub->add_option("--tol", tol, "tolerance for every check");
    sub->add_option("--t", t, "cut time");
    sub->add_option("--seed", seed, "seed for randomized inputs");
    sub->add_option("--csv", csv, "CSV table of checks");
    sub->add_flag("--deterministic", deterministic, "serial sums and zero wall time");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  cli::Options opts;
  if (sub->count("--tol")) opts.tol = tol;
  if (sub->count("--t")) opts.t = t;
  opts.seed = seed;

  Report report;
  try {
    apply_thread_env();
    if (deterministic) set_num_threads(1);
    const json spec = read_json_file(input);
    const auto start = std::chrono::steady_clock::now();
    try {
      report = cli::run_command(command, spec, opts);
    } catch (const CheckFailure& e) {
      report.command = command;
      report.add_check("check_failure", 1.0, 0.0);
      report.residuals["message"] = e.what();
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report.wall_time_s = deterministic ? 0.0 : elapsed.count();
  } catch (const InvalidArgument& e) {
    std::cerr << "qsc_cli: " << command << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qsc_cli: " << command << ": " << e.what() << '\n';
    return 2;
  }

  report.inputs = {{"spec", input}, {"seed", seed}, {"deterministic", deterministic}};
  report.inputs["tol_override"] = opts.tol ? json(*opts.tol) : json(nullptr);
  report.inputs["t_override"] = opts.t ? json(*opts.t) : json(nullptr);
  try {
    write_file(output, report.to_json().dump(2) + "\n");
    if (!csv.empty()) write_file(csv, report.to_csv());
  } catch (const std::exception& e) {
    std::cerr << "qsc_cli: " << e.what() << '\n';
    return 2;
  }
  for (const auto& c : report.checks)
    if (!c.pass) std::cerr << "qsc_cli: check '" << c.check << "' failed: " << c.value << " > " << c.tolerance << '\n';
  return report.pass() ? 0 : 1;
}

#include "netctrl/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "netctrl/analyzer.hpp"
#include "netctrl/multirate.hpp"
#include "netctrl/oracle.hpp"
#include "netctrl/report.hpp"
#include "netctrl/sysmodel.hpp"

namespace netctrl {
namespace cli {

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << std::cin.rdbuf();
    return buffer.str();
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ParseError("cannot open input file \"" + path + "\"");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::Controllable: return kExitControllable;
    case Verdict::Uncontrollable: return kExitUncontrollable;
    case Verdict::Inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

struct Options {
  std::string command;
  std::string input_path;
  std::string format = "json";
  std::string demo_id;
  bool lenient = false;
  double h_min = 0, h_max = 0;
  int count = 0;
  // CLI tolerance overrides win over file-level ones.
  double tol_rank = -1, tol_eig = -1, tol_chain = -1;
};

Tolerance apply_overrides(Tolerance tol, const Options& opt) {
  if (opt.tol_rank > 0) tol.rank_rel = opt.tol_rank;
  if (opt.tol_eig > 0) tol.eig_cluster = opt.tol_eig;
  if (opt.tol_chain > 0) tol.chain_residual = opt.tol_chain;
  tol.validate();
  return tol;
}

void emit_report(const AnalysisReport& report, const std::optional<MultiRatePattern>& multirate,
                 const Options& opt, std::ostream& out) {
  if (opt.format == "json")
    out << report_to_json(report, multirate).dump(2) << "\n";
  else
    out << report_to_text(report, multirate);
}

int run_parsed(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.command == "demo") {
    ParsedInput input;
    input.sys = fixtures::by_name(opt.demo_id);
    const Tolerance tol = apply_overrides(input.tol, opt);
    const AnalysisReport report = analyze(input.sys, tol);
    emit_report(report, std::nullopt, opt, out);
    return verdict_exit(report.verdict);
  }

  ParsedInput input = parse_system(read_input(opt.input_path), opt.lenient);
  for (const std::string& w : input.warnings) err << "warning: " << w << "\n";
  const Tolerance tol = apply_overrides(input.tol, opt);

  if (opt.command == "analyze") {
    if (input.multirate) {
      const MultiRateSpec spec{input.sys, input.multirate->kind, input.multirate->l};
      const AnalysisReport report = analyze_multirate(spec, tol);
      emit_report(report, input.multirate, opt, out);
      return verdict_exit(report.verdict);
    }
    const AnalysisReport report = analyze(input.sys, tol);
    emit_report(report, std::nullopt, opt, out);
    return verdict_exit(report.verdict);
  }

  if (opt.command == "discretize") {
    const SampledSystem ss = discretize(input.sys);
    if (opt.format == "json")
      out << sampled_to_json(ss).dump(2) << "\n";
    else
      out << sampled_to_text(ss);
    return kExitControllable;
  }

  if (opt.command == "scan") {
    const auto rows = oracle::scan_periods(input.sys, opt.h_min, opt.h_max, opt.count, tol);
    out << oracle::scan_csv(rows);
    return kExitControllable;
  }

  err << "error: unknown command\n";
  return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"controllability analysis of networked sampled-data systems"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("--tol-rank", opt.tol_rank, "relative singular-value cutoff");
    cmd->add_option("--tol-eig", opt.tol_eig, "eigenvalue clustering factor");
    cmd->add_option("--tol-chain", opt.tol_chain, "chain residual bound");
    cmd->add_flag("--lenient", opt.lenient, "warn on unknown input keys instead of failing");
  };

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "decide controllability of a system file");
  analyze_cmd->add_option("input", opt.input_path, "JSON system file or - for stdin")->required();
  add_common(analyze_cmd);

  CLI::App* scan_cmd = app.add_subcommand("scan", "sweep the sampling period over a grid");
  scan_cmd->add_option("input", opt.input_path, "JSON system file or - for stdin")->required();
  scan_cmd->add_option("--h-min", opt.h_min, "smallest period")->required();
  scan_cmd->add_option("--h-max", opt.h_max, "largest period")->required();
  scan_cmd->add_option("--count", opt.count, "number of grid points")->required();
  add_common(scan_cmd);

  CLI::App* disc_cmd = app.add_subcommand("discretize", "print the sampled system matrices");
  disc_cmd->add_option("input", opt.input_path, "JSON system file or - for stdin")->required();
  add_common(disc_cmd);

  CLI::App* demo_cmd = app.add_subcommand("demo", "run a built-in fixture");
  demo_cmd->add_option("id", opt.demo_id, "fixture id (s1..s4)")
      ->required()
      ->check(CLI::IsMember({"s1", "s2", "s3", "s4"}));
  add_common(demo_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitControllable;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  for (CLI::App* sub : {analyze_cmd, scan_cmd, disc_cmd, demo_cmd})
    if (sub->parsed()) opt.command = sub->get_name();

  try {
    return run_parsed(opt, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InternalInconsistency& e) {
    err << "internal inconsistency: " << e.what() << "\n";
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace cli
}  // namespace netctrl

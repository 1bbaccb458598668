#include "qmerl/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qmerl/audit.hpp"
#include "qmerl/scenario_io.hpp"
#include "qmerl/scenarios.hpp"

namespace qmerl::cli {

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string output;
  bool quiet = false;
  std::optional<double> split_tol;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void apply_overrides(MerlScenario& scenario, const CommonOptions& opts) {
  if (opts.split_tol) {
    if (!(*opts.split_tol > 0.0)) throw UsageError("--tolerance-split must be positive");
    scenario.tolerances.split = opts.split_tol;
  }
}

// Writes to --output when given, otherwise to `out`.
void emit(const std::string& data, const CommonOptions& opts, std::ostream& out) {
  if (opts.output.empty()) {
    out << data;
    return;
  }
  const std::filesystem::path path(opts.output);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path);
  if (!file) throw UsageError("cannot write " + opts.output);
  file << data;
}

std::string verdict_text(const MerlSpectrum& s, const char* sep = ", ") {
  if (!s.verdict) return "unclassified (mixed state)";
  std::string text;
  for (const auto& l : s.verdict->labels()) text += (text.empty() ? "" : sep) + l;
  return text;
}

int cmd_analyze(const std::string& scenario_path, const std::string& format, bool best_order,
                const CommonOptions& opts, std::ostream& out) {
  MerlScenario scenario = build_scenario(read_scenario_file(scenario_path));
  apply_overrides(scenario, opts);
  const MerlSpectrum spectrum = merl_spectrum(scenario);
  std::optional<OrderSearchResult> best;
  if (best_order) best = best_order_search(scenario);

  std::string data;
  if (format == "json") {
    json doc = spectrum_to_json(spectrum);
    if (best) doc["bestOrder"] = spectrum_to_json(best->spectrum);
    data = doc.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << spectrum_csv_header(scenario.control_order.size()) << '\n'
       << spectrum_csv_row(spectrum) << '\n';
    if (best) os << spectrum_csv_row(best->spectrum) << '\n';
    data = os.str();
  }
  emit(data, opts, out);
  if (!opts.quiet) {
    out << "splitCount " << spectrum.split_count << " of " << scenario.control_order.size()
        << "; verdict: " << verdict_text(spectrum) << '\n';
    if (best) {
      out << "best order:";
      for (auto s : best->ordering) out << ' ' << s;
      out << " -> splitCount " << best->spectrum.split_count << '\n';
    }
  }
  return kExitOk;
}

// Locates a numeric parameter by name: "lTra" or any builder param under /state.
json* find_parameter(json& doc, const std::string& name) {
  if (name == "lTra") return &doc["lTra"];
  std::function<json*(json&)> search = [&](json& node) -> json* {
    if (!node.is_object()) return nullptr;
    if (auto it = node.find("params"); it != node.end() && it->is_object()) {
      if (auto p = it->find(name); p != it->end() && p->is_number()) return &*p;
      if (auto blocks = it->find("blocks"); blocks != it->end() && blocks->is_array()) {
        for (auto& b : *blocks) {
          if (json* hit = search(b)) return hit;
        }
      }
    }
    return nullptr;
  };
  return doc.contains("state") ? search(doc["state"]) : nullptr;
}

int cmd_sweep(const std::string& scenario_path, const std::string& param, double from, double to,
              std::size_t steps, const CommonOptions& opts, std::ostream& out) {
  json doc = read_scenario_file(scenario_path);
  (void)build_scenario(doc);  // report document errors before the sweep starts
  if (find_parameter(doc, param) == nullptr) {
    throw ScenarioParseError("/state/params/" + param, "unknown sweep parameter \"" + param + "\"");
  }
  if (steps == 0) throw UsageError("steps must be at least 1");

  // integer parameters (site counts, seeds) stay integers when the grid value is integral
  const bool integral = find_parameter(doc, param)->is_number_integer();

  std::ostringstream os;
  std::size_t control_count = 0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double value =
        steps == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
    if (integral && value == std::floor(value)) {
      *find_parameter(doc, param) = static_cast<std::int64_t>(value);
    } else {
      *find_parameter(doc, param) = value;
    }
    MerlScenario scenario = build_scenario(doc);
    apply_overrides(scenario, opts);
    const MerlSpectrum spectrum = merl_spectrum(scenario);
    if (i == 0) {
      control_count = scenario.control_order.size();
      os << param;
      for (std::size_t m = 0; m <= control_count; ++m) os << ",L" << m;
      os << ",splitCount\n";
    }
    os << format_real(value);
    for (double l : spectrum.lines) os << ',' << format_real(l);
    os << ',' << spectrum.split_count << '\n';
  }
  emit(os.str(), opts, out);
  if (!opts.quiet && !opts.output.empty()) {
    out << "wrote " << steps << " rows to " << opts.output << '\n';
  }
  return kExitOk;
}

int cmd_audit(std::size_t trials, std::uint64_t seed, const CommonOptions& opts, std::ostream& out) {
  const AuditReport report = run_audit(trials, seed);
  std::ostringstream os;
  if (opts.quiet) {
    os << "check,passed,failed,worst\n";
    for (const auto& c : report.checks) {
      os << c.name << ',' << c.passed << ',' << c.failed << ',' << format_real(c.worst) << '\n';
    }
  } else {
    report.print(os);
  }
  emit(os.str(), opts, out);
  return report.all_passed() ? kExitOk : kExitNumeric;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream file(path);
  if (!file) throw UsageError("cannot write " + path.string());
  file << data;
}

int cmd_figures(const std::string& which, const CommonOptions& opts, std::ostream& out) {
  const std::filesystem::path dir(opts.output.empty() ? "figures" : opts.output);
  std::filesystem::create_directories(dir);
  std::ostringstream lines;
  std::ostringstream verdicts;
  if (which == "fig2") {
    lines << "state,m,line\n";
    verdicts << "state,splitCount,verdict\n";
    for (const auto& [name, scenario] : fig2_scenarios()) {
      const MerlSpectrum s = merl_spectrum(scenario);
      for (std::size_t m = 0; m < s.lines.size(); ++m) {
        lines << name << ',' << m << ',' << format_real(s.lines[m]) << '\n';
      }
      verdicts << name << ',' << s.split_count << ',' << verdict_text(s, ";") << '\n';
      if (!opts.quiet) out << name << ": splitCount " << s.split_count << " (" << verdict_text(s) << ")\n";
    }
  } else {
    constexpr std::size_t kPoints = 50;
    const double mu_max = 1.0 / std::sqrt(2.0);
    const std::vector<std::pair<std::string, OamBasisMap>> maps{
        {"positional", oam_positional_map()}, {"value-ordered", oam_value_ordered_map()}};
    lines << "basisMap,mu,L0,L1,L2,splitCount\n";
    verdicts << "basisMap,mu,splitCount,verdict\n";
    for (const auto& [map_name, map] : maps) {
      for (std::size_t i = 0; i < kPoints; ++i) {
        const double mu = mu_max * static_cast<double>(i) / static_cast<double>(kPoints - 1);
        const MerlSpectrum s = merl_spectrum(fig3_scenario(mu, map));
        lines << map_name << ',' << format_real(mu);
        for (double l : s.lines) lines << ',' << format_real(l);
        lines << ',' << s.split_count << '\n';
      }
      for (double mu : {0.0, 0.4, 1.0 / std::sqrt(3.0), mu_max}) {
        const MerlSpectrum s = merl_spectrum(fig3_scenario(mu, map));
        verdicts << map_name << ',' << format_real(mu) << ',' << s.split_count << ','
                 << verdict_text(s, ";") << '\n';
        if (!opts.quiet) {
          out << map_name << " mu=" << mu << ": splitCount " << s.split_count << " ("
              << verdict_text(s) << ")\n";
        }
      }
    }
  }
  write_file(dir / (which + "_lines.csv"), lines.str());
  write_file(dir / (which + "_verdicts.csv"), verdicts.str());
  if (!opts.quiet) out << "wrote " << (dir / (which + "_lines.csv")).string() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum-control-assisted conditional variances and MERL spectra", "qmerl"};
  app.require_subcommand(1);

  CommonOptions opts;
  double split_tol = 0.0;
  auto add_common = [&](CLI::App* sub, bool with_tolerance) {
    sub->add_option("-o,--output", opts.output, "output file (directory for figures)");
    sub->add_flag("-q,--quiet", opts.quiet, "print data only");
    if (with_tolerance) {
      sub->add_option("--tolerance-split", split_tol, "absolute split tolerance");
    }
  };

  std::string scenario_path;
  std::string format = "json";
  bool best_order = false;
  auto* analyze = app.add_subcommand("analyze", "MERL spectrum and verdict for a scenario file");
  analyze->add_option("scenario", scenario_path, "scenario document")->required();
  analyze->add_option("-f,--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  analyze->add_flag("--best-order", best_order, "also search all control orderings");
  add_common(analyze, true);

  std::string param;
  double from = 0.0;
  double to = 0.0;
  std::size_t steps = 0;
  auto* sweep = app.add_subcommand("sweep", "tabulate MERLs while varying one parameter");
  sweep->add_option("scenario", scenario_path, "scenario document")->required();
  sweep->add_option("param", param, "builder parameter name or lTra")->required();
  sweep->add_option("from", from)->required();
  sweep->add_option("to", to)->required();
  sweep->add_option("steps", steps)->required();
  add_common(sweep, true);

  std::size_t trials = 500;
  std::uint64_t seed = 1;
  auto* audit = app.add_subcommand("audit", "property checks on random scenarios");
  audit->add_option("-n,--trials", trials, "number of random scenarios");
  audit->add_option("--seed", seed, "random seed");
  add_common(audit, false);

  std::string which;
  auto* figures = app.add_subcommand("figures", "plot-ready CSV for the four-qubit and qutrit GHZ studies");
  figures->add_option("which", which, "fig2 or fig3")->required()->check(CLI::IsMember({"fig2", "fig3"}));
  add_common(figures, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  }
  if (split_tol != 0.0) opts.split_tol = split_tol;

  try {
    if (analyze->parsed()) return cmd_analyze(scenario_path, format, best_order, opts, out);
    if (sweep->parsed()) return cmd_sweep(scenario_path, param, from, to, steps, opts, out);
    if (audit->parsed()) return cmd_audit(trials, seed, opts, out);
    return cmd_figures(which, opts, out);
  } catch (const ScenarioParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ConsistencyError& e) {
    err << "consistency error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace qmerl::cli

// cslab: validate / run / converge scenario configs, list built-in scenarios.
// Exit codes: 0 success, 1 tolerance violation (or failed task), 2 validation error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cslab/scenario.hpp"
#include "cslab/scenario_library.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitValidation = 2;

std::string read_config_text(const std::string& source) {
  if (source.rfind("builtin:", 0) == 0) {
    const auto* b = cslab::find_builtin(source.substr(8));
    if (!b) throw cslab::ValidationError("unknown built-in scenario \"" + source.substr(8) + "\"");
    return b->text;
  }
  std::ifstream in(source);
  if (!in) throw cslab::ValidationError("cannot read config file \"" + source + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<int> parse_resolutions(const std::string& list) {
  std::vector<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw cslab::ValidationError("--resolutions: \"" + item + "\" is not an integer");
    }
  }
  return out;
}

void print_task_lines(const cslab::RunReport& rep) {
  for (const auto& t : rep.tasks) {
    std::cout << "task " << t.index << " " << t.kind << ": " << t.status;
    for (const auto& r : t.residuals) std::cout << "  " << r.name << "=" << r.value << " (tol " << r.tolerance << ")";
    if (!t.message.empty()) std::cout << "  [" << t.message << "]";
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cslab: transgression forms, differential characters and flat-family invariants on grid tori"};
  app.require_subcommand(1);

  std::string config;
  std::string out_path;
  std::string csv_dir;
  std::string resolutions = "16,32,64";
  std::string export_dir;

  auto* validate = app.add_subcommand("validate", "Parse and check a config (and build its families)");
  validate->add_option("config", config, "Config file, or builtin:<name>")->required();

  auto* run = app.add_subcommand("run", "Run every task of a config");
  run->add_option("config", config, "Config file, or builtin:<name>")->required();
  run->add_option("--out", out_path, "Write the JSON report here");
  run->add_option("--csv", csv_dir, "Write tasks.csv into this directory");

  auto* converge = app.add_subcommand("converge", "Residual-vs-resolution table with fitted order");
  converge->add_option("config", config, "Config file, or builtin:<name>")->required();
  converge->add_option("--resolutions", resolutions, "Comma-separated grid resolutions");
  converge->add_option("--out", out_path, "Write the JSON table here");
  converge->add_option("--csv", csv_dir, "Write convergence.csv into this directory");

  auto* list = app.add_subcommand("list-scenarios", "List built-in scenarios");
  list->add_option("--export", export_dir, "Also write each scenario as <dir>/<name>.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*list) {
      for (const auto& s : cslab::builtin_scenarios()) {
        const auto doc = cslab::json::parse(s.text);
        std::cout << s.name << "  " << doc.value("description", "") << "\n";
        if (!export_dir.empty()) write_file(std::filesystem::path(export_dir) / (s.name + ".json"), s.text + "\n");
      }
      return kExitOk;
    }

    const cslab::ScenarioConfig cfg = cslab::parse_config_text(read_config_text(config));

    if (*validate) {
      cslab::build_scenario(cfg);
      std::cout << "ok: " << cfg.name << " (" << cfg.families.size() << " families, " << cfg.chains.size() << " chains, "
                << cfg.tasks.size() << " tasks)\n";
      return kExitOk;
    }

    if (*run) {
      const cslab::RunReport rep = cslab::run_scenario(cfg);
      const std::string text = rep.to_json().dump(2) + "\n";
      if (!out_path.empty()) write_file(out_path, text);
      else std::cout << text;
      if (!csv_dir.empty()) write_file(std::filesystem::path(csv_dir) / "tasks.csv", cslab::report_csv(rep));
      if (!out_path.empty()) print_task_lines(rep);
      return rep.exit_status() == 0 ? kExitOk : kExitTolerance;
    }

    if (*converge) {
      const cslab::ConvergenceTable table = cslab::convergence_study(cfg, parse_resolutions(resolutions));
      std::cout << table.csv();
      if (table.fitted_order) std::cout << "# fitted order " << *table.fitted_order << "\n";
      if (!csv_dir.empty()) write_file(std::filesystem::path(csv_dir) / "convergence.csv", table.csv());
      if (!out_path.empty()) write_file(out_path, table.to_json().dump(2) + "\n");
      if (cfg.tolerances.min_order && !(table.fitted_order && *table.fitted_order >= *cfg.tolerances.min_order)) {
        std::cerr << "fitted order below the configured minimum " << *cfg.tolerances.min_order << "\n";
        return kExitTolerance;
      }
      return kExitOk;
    }
  } catch (const cslab::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTolerance;
  }
  return kExitOk;
}

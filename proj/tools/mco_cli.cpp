#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mco/emit.hpp"
#include "mco/presets.hpp"
#include "mco/runner.hpp"

namespace fs = std::filesystem;

namespace {

// Accepts "1,2,3" and "1-30" forms, mixed freely.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    auto dash = part.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(std::stoull(part));
    } else {
      std::uint64_t lo = std::stoull(part.substr(0, dash));
      std::uint64_t hi = std::stoull(part.substr(dash + 1));
      if (hi < lo) throw std::invalid_argument("seed range is descending: " + part);
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    }
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds given");
  return seeds;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-channel C-ITS station stack simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Simulate a scenario or preset over a seed list");
  std::string scenario_path, preset_name, seed_text = "1", out_dir = ".";
  std::vector<std::string> emit = {"metrics_csv", "summary_json"};
  int jobs = 0;
  auto* opt_scenario = run->add_option("--scenario", scenario_path, "Scenario document (JSON)");
  auto* opt_preset = run->add_option("--preset", preset_name, "Named preset configuration");
  opt_scenario->excludes(opt_preset);
  opt_preset->excludes(opt_scenario);
  run->add_option("--seeds", seed_text, "Comma list and/or ranges, e.g. 1,2,10-20");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--emit", emit, "Artifacts to write")
      ->check(CLI::IsMember({"metrics_csv", "trace_jsonl", "summary_json"}));
  run->add_option("--jobs", jobs, "Worker threads (0 = hardware)");

  auto* validate = app.add_subcommand("validate", "Parse and check a scenario document");
  std::string validate_path, validate_preset;
  auto* vopt_scenario =
      validate->add_option("--scenario", validate_path, "Scenario document (JSON)");
  auto* vopt_preset =
      validate->add_option("--preset", validate_preset, "Named preset configuration");
  vopt_scenario->excludes(vopt_preset);
  vopt_preset->excludes(vopt_scenario);

  auto* list = app.add_subcommand("list-presets", "Show available presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& n : mco::preset_names()) std::cout << n << "\n";
      return 0;
    }
    if (validate->parsed()) {
      if (validate_path.empty() && validate_preset.empty()) {
        std::cerr << "error: validate needs --scenario or --preset\n";
        return 2;
      }
      mco::Scenario cfg = validate_preset.empty()
                              ? mco::parse_scenario(read_file(validate_path))
                              : mco::parse_scenario(
                                    mco::emit_scenario(mco::preset_scenario(validate_preset)));
      std::cout << "ok: " << cfg.templates.size() << " template(s), ~"
                << cfg.expected_station_count() << " stations expected\n";
      return 0;
    }

    if (scenario_path.empty() && preset_name.empty()) {
      std::cerr << "error: run needs --scenario or --preset\n";
      return 2;
    }
    mco::Scenario base = preset_name.empty() ? mco::parse_scenario(read_file(scenario_path))
                                             : mco::preset_scenario(preset_name);
    std::vector<std::uint64_t> seeds = parse_seeds(seed_text);

    bool want_csv = false, want_trace = false, want_summary = false;
    for (const auto& e : emit) {
      if (e == "metrics_csv") want_csv = true;
      if (e == "trace_jsonl") want_trace = true;
      if (e == "summary_json") want_summary = true;
    }
    if (want_trace) base.trace = true;

    fs::create_directories(out_dir);
    std::vector<mco::Metrics> runs = mco::run_seeds(base, seeds, jobs);

    if (want_csv) {
      auto cbr = open_out(fs::path(out_dir) / "cbr.csv");
      cbr << mco::kCbrCsvHeader << '\n';
      auto prr = open_out(fs::path(out_dir) / "prr.csv");
      prr << mco::kPrrCsvHeader << '\n';
      for (std::size_t i = 0; i < runs.size(); ++i) {
        mco::append_cbr_csv(cbr, runs[i], seeds[i]);
        mco::append_prr_csv(prr, runs[i], seeds[i]);
      }
    }
    if (want_trace) {
      for (std::size_t i = 0; i < runs.size(); ++i) {
        auto tr = open_out(fs::path(out_dir) / ("trace_seed" + std::to_string(seeds[i]) +
                                                ".jsonl"));
        mco::write_trace_jsonl(tr, runs[i]);
      }
    }
    if (want_summary) {
      auto sj = open_out(fs::path(out_dir) / "summary.json");
      sj << mco::summary_json(base, seeds, runs, preset_name).dump(2) << '\n';
    }
    return 0;
  } catch (const mco::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// Command-line front end for the tidal turbine noise simulator.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tccs/config.hpp"
#include "tccs/scenario.hpp"
#include "tccs/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt_level(const tccs::SourceLevel& l) { return l ? fmt(*l) : std::string(); }

// Atomic write: temp file in the target directory, then rename.
void write_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write output file: " + path.string());
    os << content;
  }
  fs::rename(tmp, path);
}

std::uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash input file: " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char out[32];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return std::strtoull(out, nullptr, 16);
}

std::string hash_hex(const fs::path& path) {
  char out[32];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(fnv1a64_file(path)));
  return out;
}

struct OutputWriter {
  fs::path dir;
  std::string format;  // "csv" or "json"

  void table(const std::string& base, const std::vector<std::string>& columns,
             const std::vector<std::vector<std::string>>& rows) const {
    if (format == "json") {
      ordered_json arr = ordered_json::array();
      for (const auto& row : rows) {
        ordered_json obj;
        for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = row[c];
        arr.push_back(obj);
      }
      write_file(dir / (base + ".json"), arr.dump(2) + "\n");
      return;
    }
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c)
      out += columns[c] + (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows)
      for (std::size_t c = 0; c < row.size(); ++c)
        out += row[c] + (c + 1 < row.size() ? "," : "\n");
    write_file(dir / (base + ".csv"), out);
  }
};

ordered_json base_summary(const std::string& subcommand, const std::string& config_path,
                          const tccs::LoadedConfig& loaded) {
  ordered_json s;
  s["tool_version"] = tccs::kVersion;
  s["subcommand"] = subcommand;
  s["config"] = loaded.resolved;
  s["applied_defaults"] = loaded.applied_defaults;
  ordered_json hashes;
  hashes["config"] = hash_hex(config_path);
  if (!loaded.scenario.flow.path.empty()) hashes["flow"] = hash_hex(loaded.scenario.flow.path);
  if (!loaded.scenario.species_path.empty())
    hashes["species"] = hash_hex(loaded.scenario.species_path);
  s["input_hashes"] = hashes;
  return s;
}

void write_states(const OutputWriter& w, const tccs::RunResult& res) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(res.states.size());
  for (const auto& st : res.states)
    rows.push_back({fmt(st.t), fmt(st.u), fmt(st.omega), fmt(st.lambda), fmt(st.cp),
                    fmt(st.torque_rotor), fmt(st.torque_gen), fmt(st.p_mech)});
  w.table("states",
          {"t_s", "u_mps", "omega_rad_s", "lambda", "cp", "torque_rotor_nm", "torque_gen_nm",
           "p_mech_w"},
          rows);
}

void write_spl(const OutputWriter& w, const tccs::RunResult& res) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(res.states.size() * res.distances.size());
  for (std::size_t i = 0; i < res.states.size(); ++i)
    for (const auto& rec : res.received[i])
      rows.push_back({fmt(res.states[i].t), fmt(rec.r), fmt_level(rec.turb),
                      fmt_level(rec.gear), fmt_level(rec.gen), fmt_level(rec.total)});
  w.table("spl", {"t_s", "r_m", "spl_turb_db", "spl_gear_db", "spl_gen_db", "spl_total_db"},
          rows);
}

void write_impacts(const OutputWriter& w, const std::vector<tccs::ImpactResult>& impacts) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& im : impacts)
    rows.push_back({im.species, fmt(im.tts_level), fmt(im.pts_level), fmt(im.audible_radius),
                    fmt(im.tts_radius), fmt(im.pts_radius)});
  w.table("impacts",
          {"species", "tts_db", "pts_db", "audible_radius_m", "tts_radius_m", "pts_radius_m"},
          rows);
}

std::vector<tccs::SpeciesProfile> load_species_if_any(const tccs::ScenarioConfig& cfg) {
  if (cfg.species_path.empty()) return {};
  return tccs::load_species_csv(cfg.species_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tidal current conversion system noise simulator"};
  app.set_version_flag("--version", tccs::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string param;
  std::string values_csv;
  double distance = 100.0;
  std::string species_name;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* c = sub->add_option("--config", config_path, "Scenario config file (JSON)");
    if (needs_config) c->required();
    sub->add_option("--set", overrides, "Config override key=value (repeatable)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", format, "Output table format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* cmd_run = app.add_subcommand("run", "Run one scenario end to end");
  add_common(cmd_run);

  auto* cmd_sweep = app.add_subcommand("sweep", "Sweep one control parameter");
  add_common(cmd_sweep);
  cmd_sweep->add_option("--param", param, "Parameter: f_s | kopt_factor | drivetrain_kind")
      ->required();
  cmd_sweep->add_option("--values", values_csv, "Comma-separated sweep values")->required();

  auto* cmd_assess = app.add_subcommand("assess", "Species impact assessment");
  add_common(cmd_assess);

  auto* cmd_corr = app.add_subcommand("correlate", "SPL vs speed correlations");
  add_common(cmd_corr);

  auto* cmd_onset = app.add_subcommand("onset", "TTS onset flow speed search");
  add_common(cmd_onset);
  cmd_onset->add_option("--species", species_name, "Species name (default: lowest GTV)");
  cmd_onset->add_option("--distance", distance, "Receiver range, m");

  auto* cmd_synth = app.add_subcommand("synth-flow", "Write a synthesized flow CSV");
  add_common(cmd_synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "error_code: usage\n";
    return kExitUsage;
  }

  try {
    const tccs::LoadedConfig loaded = tccs::load_config(config_path, overrides);
    const tccs::ScenarioConfig& cfg = loaded.scenario;
    fs::create_directories(out_dir);
    OutputWriter w{out_dir, format};
    const std::string sub = app.get_subcommands().front()->get_name();
    ordered_json summary = base_summary(sub, config_path, loaded);

    if (sub == "run" || sub == "assess") {
      const auto species = load_species_if_any(cfg);
      const tccs::RunResult res = tccs::run_scenario(cfg, species.empty() ? nullptr : &species);
      if (sub == "run") {
        write_states(w, res);
        write_spl(w, res);
      }
      write_impacts(w, res.impacts);
      summary["results"]["energy_j"] = fmt(res.energy);
      if (std::isfinite(res.spl_max_50m))
        summary["results"]["spl_max_50m_db"] = fmt(res.spl_max_50m);
      summary["results"]["max_spl_t_s"] = fmt(res.states[res.max_spl_index].t);
    } else if (sub == "sweep") {
      tccs::SweepSpec spec;
      if (param == "f_s") spec.parameter = tccs::SweepParameter::f_s;
      else if (param == "kopt_factor") spec.parameter = tccs::SweepParameter::kopt_factor;
      else if (param == "drivetrain_kind") spec.parameter = tccs::SweepParameter::drivetrain_kind;
      else throw tccs::ConfigError("unknown sweep parameter: " + param);
      std::stringstream ss(values_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) spec.values.push_back(std::stod(tok));
      const auto species = load_species_if_any(cfg);
      const auto rows = tccs::sweep(cfg, spec, species.empty() ? nullptr : &species);
      std::vector<std::vector<std::string>> table;
      for (const auto& r : rows)
        table.push_back({fmt(r.value), fmt(r.spl_max_50m), fmt(r.energy)});
      w.table("sweep", {"value", "spl_max_50m_db", "energy_j"}, table);
      summary["results"]["rows"] = rows.size();
    } else if (sub == "correlate") {
      const tccs::RunResult res = tccs::run_scenario(cfg);
      const tccs::CorrelationResult c = tccs::correlate(res, cfg.settle_skip);
      w.table("correlation", {"spl_vs_omega", "spl_vs_u", "samples"},
              {{fmt(c.spl_vs_omega), fmt(c.spl_vs_u), std::to_string(c.samples)}});
      summary["results"]["spl_vs_omega"] = fmt(c.spl_vs_omega);
      summary["results"]["spl_vs_u"] = fmt(c.spl_vs_u);
    } else if (sub == "onset") {
      const auto species = load_species_if_any(cfg);
      if (species.empty())
        throw tccs::ConfigError("onset requires species_path in the config");
      const tccs::SpeciesProfile* chosen = nullptr;
      if (species_name.empty()) {
        for (const auto& sp : species)
          if (!chosen || sp.gtv < chosen->gtv) chosen = &sp;
      } else {
        for (const auto& sp : species)
          if (sp.name == species_name) chosen = &sp;
        if (!chosen) throw tccs::ConfigError("species not found: " + species_name);
      }
      const tccs::OnsetResult r = tccs::tts_onset_speed(cfg, *chosen, distance, cfg.exposure);
      w.table("onset", {"species", "r_m", "tts_threshold_db", "found", "u_onset_mps"},
              {{chosen->name, fmt(r.r), fmt(r.threshold), r.found ? "true" : "false",
                r.found ? fmt(r.u_onset) : std::string()}});
      summary["results"]["found"] = r.found;
      if (r.found) summary["results"]["u_onset_mps"] = fmt(r.u_onset);
    } else if (sub == "synth-flow") {
      if (!cfg.flow.synth)
        throw tccs::ConfigError("synth-flow requires a flow.synth section in the config");
      const tccs::FlowSeries flow = cfg.flow.load();
      std::ostringstream os;
      tccs::write_flow_csv(flow, os);
      write_file(fs::path(out_dir) / "flow.csv", os.str());
      summary["results"]["samples"] = flow.size();
    }

    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
    return kExitOk;
  } catch (const tccs::ConfigError& e) {
    std::cerr << "error_code: config_invalid " << e.what() << "\n";
    return kExitConfig;
  } catch (const tccs::FlowError& e) {
    std::cerr << "error_code: config_invalid " << e.what() << "\n";
    return kExitConfig;
  } catch (const tccs::BioimpactError& e) {
    std::cerr << "error_code: config_invalid " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error_code: numerical_failure " << e.what() << "\n";
    return kExitNumerical;
  }
}

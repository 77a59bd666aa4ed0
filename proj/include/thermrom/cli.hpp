#pragma once

// Subcommands of the `thermrom` tool. run_cli() is the whole program minus
// main(), so tests can drive it in-process.
//
// Exit codes: 0 success, 2 input/data error, 3 non-convergence, 4 internal
// error (numerical blow-up, broken invariant).

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thermrom/thermrom.hpp"

namespace thermrom::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kDataError = 2, kNotConverged = 3, kInternalError = 4 };

/// Worker threads allowed by THERMROM_THREADS (default: hardware threads).
inline std::size_t thread_budget() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("THERMROM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = static_cast<std::size_t>(v);
  }
  return n;
}

inline std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

struct Manifest {
  std::string subcommand;
  std::vector<std::string> argv;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  nlohmann::ordered_json options = nlohmann::ordered_json::object();
};

inline std::string manifest_path(const std::string& output) { return output + ".manifest.json"; }

inline nlohmann::ordered_json manifest_to_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["subcommand"] = m.subcommand;
  j["argv"] = m.argv;
  j["inputs"] = m.inputs;
  j["seed"] = m.seed;
  j["options"] = m.options;
  j["version"] = kVersion;
  j["outputs"] = m.outputs;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  out << text;
  if (!out) throw DataError("failed writing output file: " + path);
}

inline void write_manifest(const Manifest& m) {
  if (m.outputs.empty()) return;
  write_text(manifest_path(m.outputs.front()), manifest_to_json(m).dump(2) + "\n");
}

inline void print_modal(std::ostream& out, const RomCoefficients& c) {
  if (!is_admissible(c)) {
    out << "modal: coefficients not admissible (need c1 > 0, c2 >= 0, c3 > 0)\n";
    return;
  }
  const auto m = modal_analysis(c);
  out << "omega_n      = " << fmt("%.6g", m.omega_n) << " 1/h\n";
  out << "xi           = " << fmt("%.6g", m.xi) << "\n";
  out << "sigma        = " << fmt("%.6g", m.sigma) << " 1/h\n";
  out << "omega        = " << fmt("%.6g", m.omega) << " 1/h\n";
  out << "regime       = " << to_string(m.regime) << "\n";
  for (int i = 0; i < 2; ++i) {
    const auto& l = m.eigenvalues[static_cast<std::size_t>(i)];
    out << "lambda" << i + 1 << "      = " << fmt("%.6g", l.real());
    if (l.imag() != 0.0) out << (l.imag() > 0 ? " + " : " - ") << fmt("%.6g", std::abs(l.imag())) << "i";
    out << " 1/h\n";
  }
}

inline ErrorNormalization parse_metric(const std::string& s) {
  if (s == "mean") return ErrorNormalization::mean;
  if (s == "range") return ErrorNormalization::range;
  throw DataError("unknown metric '" + s + "' (mean|range)");
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

struct FitArgs {
  std::optional<double> pin_c4;
  std::size_t starts = 16;
  std::uint64_t seed = 0;
  std::size_t max_evals = 2000;
  double tol = 1e-8;
  std::size_t window = kDefaultWindowHours;
  std::string metric = "mean";
  std::string method = "exact_zoh";
  std::size_t substeps = 10;

  void add_to(CLI::App& app) {
    app.add_option("--pin-c4", pin_c4, "Fix c4 to this value and fit c1..c3");
    app.add_option("--starts", starts, "Multi-start count")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed for the start points");
    app.add_option("--max-evals", max_evals, "Objective evaluations per start")->check(CLI::PositiveNumber);
    app.add_option("--tol", tol, "Relative objective stall tolerance");
    app.add_option("--window", window, "Fit the first N samples (0 = all)");
    app.add_option("--metric", metric, "Error normalization: mean|range");
    app.add_option("--method", method, "Integrator: exact_zoh|rk4");
    app.add_option("--substeps", substeps, "RK4 substeps per sample")->check(CLI::PositiveNumber);
  }

  FitOptions options() const {
    FitOptions o;
    o.pinned_c4 = pin_c4;
    o.n_starts = starts;
    o.seed = seed;
    o.max_evals = max_evals;
    o.tol = tol;
    o.metric = parse_metric(metric);
    o.threads = thread_budget();
    return o;
  }

  SimConfig sim_config(double spacing) const {
    SimConfig cfg;
    cfg.method = parse_integration_method(method);
    cfg.dt = cfg.method == IntegrationMethod::rk4 ? spacing / static_cast<double>(substeps) : spacing;
    return cfg;
  }

  nlohmann::ordered_json echo() const {
    nlohmann::ordered_json j;
    j["pin_c4"] = pin_c4 ? nlohmann::ordered_json(*pin_c4) : nlohmann::ordered_json(nullptr);
    j["starts"] = starts;
    j["max_evals"] = max_evals;
    j["tol"] = tol;
    j["window"] = window;
    j["metric"] = metric;
    j["method"] = method;
    j["substeps"] = substeps;
    return j;
  }
};

struct FitInputs {
  TimeSeries indoor, outdoor;
};

inline FitInputs select_fit_columns(const Dataset& ds, std::optional<std::string> indoor_col,
                                    const std::string& outdoor_col, std::size_t window) {
  if (!ds.contains(outdoor_col)) throw DataError("outdoor column '" + outdoor_col + "' not found in data");
  std::string indoor_name;
  if (indoor_col) {
    indoor_name = *indoor_col;
  } else {
    indoor_name = ds.contains("t_in") ? "t_in" : "t_in_agg";
  }
  if (!ds.contains(indoor_name)) throw DataError("indoor column '" + indoor_name + "' not found in data");
  FitInputs in{ds.at(indoor_name), ds.at(outdoor_col)};
  if (window > 0) {
    in.indoor = head(in.indoor, window);
    in.outdoor = head(in.outdoor, window);
  }
  return in;
}

struct FitReport {
  FitResult result;
  ModalParameters modal;
};

inline void print_fit(std::ostream& out, const FitResult& r) {
  const auto& c = r.coefficients;
  out << "c1           = " << fmt("%.6f", c.c1) << "\n";
  out << "c2           = " << fmt("%.6f", c.c2) << "\n";
  out << "c3           = " << fmt("%.6f", c.c3) << "\n";
  out << "c4           = " << fmt("%.6f", c.c4) << "\n";
  out << "rmse_percent = " << fmt("%.6g", r.rmse_percent) << "\n";
  out << "converged    = " << (r.converged ? "true" : "false") << "\n";
  out << "start_index  = " << r.start_index << "\n";
  out << "n_evals      = " << r.n_evals << "\n";
  print_modal(out, c);
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

namespace detail {

inline nlohmann::ordered_json fit_summary(const FitResult& r) {
  nlohmann::ordered_json j;
  j["c1"] = r.coefficients.c1;
  j["c2"] = r.coefficients.c2;
  j["c3"] = r.coefficients.c3;
  j["c4"] = r.coefficients.c4;
  j["rmse_percent"] = r.rmse_percent;
  j["converged"] = r.converged;
  j["start_index"] = r.start_index;
  j["n_evals"] = r.n_evals;
  return j;
}

template <class Fn>
auto with_preset_context(const std::string& preset_name, Fn&& fn) {
  const std::string prefix = "preset '" + preset_name + "': ";
  try {
    return fn();
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(prefix + e.what());
  } catch (const SimulationError& e) {
    throw SimulationError(prefix + e.what());
  }
}

}  // namespace detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> argv_echo = args;
  CLI::App app{"Second-order thermal zone models: generate, fit, simulate, compare, analyze"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // generate
  auto* gen = app.add_subcommand("generate", "Simulate a preset building and write a dataset CSV");
  std::string g_preset, g_profile = "mild_coastal", g_out, g_preset_json;
  std::size_t g_days = 12, g_warmup = kDefaultWarmupDays, g_substeps = kDefaultSubsteps;
  std::uint64_t g_seed = 0;
  gen->add_option("--preset", g_preset, "standard|brick|brick_insulation|brick_insulation_concrete|multizone4")->required();
  gen->add_option("--days", g_days, "Days of hourly data")->check(CLI::PositiveNumber);
  gen->add_option("--seed", g_seed, "Weather seed");
  gen->add_option("--profile", g_profile, "Weather profile: mild_coastal|hot_inland");
  gen->add_option("--warmup-days", g_warmup, "Simulated days discarded before recording");
  gen->add_option("--substeps", g_substeps, "RK4 substeps per hour")->check(CLI::PositiveNumber);
  gen->add_option("--out", g_out, "Output CSV path")->required();
  gen->add_option("--preset-json", g_preset_json, "Also write the network definition as JSON");

  // fit
  auto* fitc = app.add_subcommand("fit", "Fit c1..c4 to indoor/outdoor columns of a dataset");
  std::string f_data, f_outdoor = "t_out", f_out;
  std::optional<std::string> f_indoor;
  FitArgs f_args;
  fitc->add_option("--data", f_data, "Dataset CSV")->required();
  fitc->add_option("--indoor", f_indoor, "Indoor column (default t_in, else t_in_agg)");
  fitc->add_option("--outdoor", f_outdoor, "Outdoor column");
  fitc->add_option("--out", f_out, "Model JSON output path")->required();
  f_args.add_to(*fitc);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a model against the outdoor column of a CSV");
  std::string s_model, s_data, s_outdoor = "t_out", s_out, s_method = "exact_zoh";
  std::optional<std::string> s_indoor;
  std::optional<double> s_x0, s_v0;
  std::size_t s_substeps = 10;
  sim->add_option("--model", s_model, "Model JSON")->required();
  sim->add_option("--data", s_data, "CSV with the outdoor column")->required();
  sim->add_option("--outdoor", s_outdoor, "Outdoor column");
  sim->add_option("--indoor", s_indoor, "Indoor column used for the initial state and echoed to the output");
  sim->add_option("--x0", s_x0, "Initial temperature (default: indoor[0], else steady state)");
  sim->add_option("--v0", s_v0, "Initial rate (default: indoor finite difference, else 0)");
  sim->add_option("--method", s_method, "Integrator: exact_zoh|rk4");
  sim->add_option("--substeps", s_substeps, "RK4 substeps per sample")->check(CLI::PositiveNumber);
  sim->add_option("--out", s_out, "Output CSV path")->required();

  // compare
  auto* cmp = app.add_subcommand("compare", "Generate and fit several presets, tabulate coefficients");
  std::string c_presets, c_profile = "mild_coastal", c_out;
  std::size_t c_days = 12;
  std::uint64_t c_seed = 0;
  FitArgs c_args;
  cmp->add_option("--presets", c_presets, "Comma separated preset names (>= 2)")->required();
  cmp->add_option("--days", c_days, "Days per dataset")->check(CLI::PositiveNumber);
  cmp->add_option("--weather-seed", c_seed, "Weather seed shared by all presets");
  cmp->add_option("--profile", c_profile, "Weather profile");
  cmp->add_option("--out", c_out, "Table CSV output path");
  c_args.add_to(*cmp);

  // analyze
  auto* ana = app.add_subcommand("analyze", "Modal parameters, steady state and indoor/outdoor lag");
  std::string a_model, a_data, a_outdoor = "t_out";
  std::optional<std::string> a_indoor;
  double a_u = 0.0;
  int a_max_lag = 12;
  ana->add_option("--model", a_model, "Model JSON");
  ana->add_option("--data", a_data, "Dataset CSV");
  ana->add_option("--indoor", a_indoor, "Indoor column (default t_in, else t_in_agg)");
  ana->add_option("--outdoor", a_outdoor, "Outdoor column");
  ana->add_option("--u", a_u, "Constant input for the steady-state report");
  ana->add_option("--max-lag", a_max_lag, "Lag search half-width in samples")->check(CLI::NonNegativeNumber);

  // replay
  auto* rep = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  std::string r_manifest;
  rep->add_option("manifest", r_manifest, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kDataError;
  }

  Manifest manifest;
  manifest.argv = argv_echo;

  try {
    if (*gen) {
      manifest.subcommand = "generate";
      manifest.seed = g_seed;
      DatasetOptions o;
      o.days = g_days;
      o.seed = g_seed;
      o.profile = parse_weather_profile(g_profile);
      o.warmup_days = g_warmup;
      o.substeps = g_substeps;
      const ZoneNetwork net = preset(g_preset);
      const auto cols = generate_dataset(net, o);
      write_csv(g_out, cols);
      manifest.outputs.push_back(g_out);
      if (!g_preset_json.empty()) {
        write_text(g_preset_json, network_to_json(net).dump(2) + "\n");
        manifest.outputs.push_back(g_preset_json);
      }
      manifest.options = {{"preset", g_preset}, {"days", g_days}, {"profile", g_profile},
                          {"warmup_days", g_warmup}, {"substeps", g_substeps}};
      write_manifest(manifest);
      out << "wrote " << cols.front().size() << " rows x " << cols.size() << " columns to " << g_out << "\n";
      return kOk;
    }

    if (*fitc) {
      manifest.subcommand = "fit";
      manifest.seed = f_args.seed;
      manifest.inputs.push_back(f_data);
      const Dataset ds = read_csv(f_data);
      const auto in = select_fit_columns(ds, f_indoor, f_outdoor, f_args.window);
      const double spacing = uniform_spacing(in.indoor);
      const FitResult r = fit(in.indoor, in.outdoor, f_args.options(), f_args.sim_config(spacing));
      write_model_file(f_out, r.coefficients);
      manifest.outputs.push_back(f_out);
      manifest.options = f_args.echo();
      manifest.options["indoor"] = in.indoor.label;
      manifest.options["outdoor"] = f_outdoor;
      manifest.options["result"] = detail::fit_summary(r);
      write_manifest(manifest);
      print_fit(out, r);
      if (!r.converged) {
        err << "error: fit did not converge: every start exhausted --max-evals\n";
        return kNotConverged;
      }
      return kOk;
    }

    if (*sim) {
      manifest.subcommand = "simulate";
      manifest.inputs = {s_model, s_data};
      const RomCoefficients c = read_model_file(s_model);
      const Dataset ds = read_csv(s_data);
      if (!ds.contains(s_outdoor)) throw DataError("outdoor column '" + s_outdoor + "' not found in data");
      const TimeSeries& u = ds.at(s_outdoor);
      SimConfig cfg;
      cfg.method = parse_integration_method(s_method);
      const double spacing = u.size() >= 2 ? uniform_spacing(u) : 1.0;
      cfg.dt = cfg.method == IntegrationMethod::rk4 ? spacing / static_cast<double>(s_substeps) : spacing;
      std::vector<TimeSeries> cols{u};
      if (s_indoor) {
        if (!ds.contains(*s_indoor)) throw DataError("indoor column '" + *s_indoor + "' not found in data");
        const TimeSeries& x = ds.at(*s_indoor);
        cfg.x0 = x.v.front();
        cfg.v0 = x.size() >= 2 ? default_initial_rate(x) : 0.0;
        cols.push_back(x);
      } else {
        cfg.x0 = steady_state(c, u.v.front());
        cfg.v0 = 0.0;
      }
      if (s_x0) cfg.x0 = *s_x0;
      if (s_v0) cfg.v0 = *s_v0;
      TimeSeries model = simulate(to_state_space(c), u, cfg);
      model.label = "t_model";
      cols.push_back(model);
      write_csv(s_out, cols);
      manifest.outputs.push_back(s_out);
      manifest.options = {{"outdoor", s_outdoor}, {"method", s_method}, {"substeps", s_substeps},
                          {"x0", cfg.x0}, {"v0", cfg.v0}};
      write_manifest(manifest);
      if (s_indoor) out << "rmse_percent = " << fmt("%.6g", rmse_percent(cols[1], model)) << "\n";
      out << "wrote " << model.size() << " rows to " << s_out << "\n";
      return kOk;
    }

    if (*cmp) {
      manifest.subcommand = "compare";
      manifest.seed = c_args.seed;
      const auto names = split_list(c_presets);
      if (names.size() < 2) throw DataError("compare needs at least 2 presets");
      DatasetOptions o;
      o.days = c_days;
      o.seed = c_seed;
      o.profile = parse_weather_profile(c_profile);
      const FitOptions fo = c_args.options();

      struct Row {
        std::string name;
        FitResult r;
      };
      std::vector<Row> rows;
      for (const auto& name : names) {
        rows.push_back({name, detail::with_preset_context(name, [&] {
                          const auto cols = generate_dataset(name, o);
                          const Dataset ds{cols};
                          const auto in = select_fit_columns(ds, std::nullopt, "t_out", c_args.window);
                          return fit(in.indoor, in.outdoor, fo, c_args.sim_config(uniform_spacing(in.indoor)));
                        })});
      }

      std::ostringstream table;
      table << "preset,c1,c2,c3,c4,rmse_percent,omega_n,xi,regime,converged\n";
      for (const auto& row : rows) {
        const auto& c = row.r.coefficients;
        const auto m = modal_analysis(c);
        table << row.name << ',' << format_double(c.c1) << ',' << format_double(c.c2) << ','
              << format_double(c.c3) << ',' << format_double(c.c4) << ',' << format_double(row.r.rmse_percent)
              << ',' << format_double(m.omega_n) << ',' << format_double(m.xi) << ',' << to_string(m.regime)
              << ',' << (row.r.converged ? "true" : "false") << '\n';
      }
      // (max - min) / mean per coefficient
      std::array<double, 4> spread{};
      for (int k = 0; k < 4; ++k) {
        std::vector<double> v;
        for (const auto& row : rows) {
          const auto& c = row.r.coefficients;
          v.push_back(k == 0 ? c.c1 : k == 1 ? c.c2 : k == 2 ? c.c3 : c.c4);
        }
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double m = mean(v);
        spread[static_cast<std::size_t>(k)] = m != 0.0 ? (*hi - *lo) / std::abs(m) : 0.0;
      }
      table << "spread_ratio," << format_double(spread[0]) << ',' << format_double(spread[1]) << ','
            << format_double(spread[2]) << ',' << format_double(spread[3]) << ",,,,,\n";

      char line[256];
      std::snprintf(line, sizeof line, "%-27s %10s %10s %10s %10s %9s %9s %8s  %s\n", "preset", "c1", "c2", "c3",
                    "c4", "rmse%", "omega_n", "xi", "regime");
      out << line;
      for (const auto& row : rows) {
        const auto& c = row.r.coefficients;
        const auto m = modal_analysis(c);
        std::snprintf(line, sizeof line, "%-27s %10.5f %10.5f %10.5f %10.5f %9.4f %9.5f %8.4f  %s\n",
                      row.name.c_str(), c.c1, c.c2, c.c3, c.c4, row.r.rmse_percent, m.omega_n, m.xi,
                      std::string(to_string(m.regime)).c_str());
        out << line;
      }
      std::snprintf(line, sizeof line, "%-27s %10.4f %10.4f %10.4f %10.4f\n", "spread (max-min)/mean", spread[0],
                    spread[1], spread[2], spread[3]);
      out << line;

      bool all_converged = true;
      for (const auto& row : rows) all_converged = all_converged && row.r.converged;
      if (!c_out.empty()) {
        write_text(c_out, table.str());
        manifest.outputs.push_back(c_out);
        manifest.options = c_args.echo();
        manifest.options["presets"] = names;
        manifest.options["days"] = c_days;
        manifest.options["weather_seed"] = c_seed;
        manifest.options["profile"] = c_profile;
        write_manifest(manifest);
      }
      if (!all_converged) {
        err << "error: at least one preset fit did not converge\n";
        return kNotConverged;
      }
      return kOk;
    }

    if (*ana) {
      if (a_model.empty() && a_data.empty()) throw DataError("analyze needs --model and/or --data");
      if (!a_model.empty()) {
        const RomCoefficients c = read_model_file(a_model);
        out << "c1           = " << fmt("%.6f", c.c1) << "\n";
        out << "c2           = " << fmt("%.6f", c.c2) << "\n";
        out << "c3           = " << fmt("%.6f", c.c3) << "\n";
        out << "c4           = " << fmt("%.6f", c.c4) << "\n";
        print_modal(out, c);
        if (c.c3 > 0.0) out << "steady_state = " << fmt("%.6g", steady_state(c, a_u)) << " C at u = " << fmt("%.6g", a_u) << " C\n";
      }
      if (!a_data.empty()) {
        const Dataset ds = read_csv(a_data);
        const auto in = select_fit_columns(ds, a_indoor, a_outdoor, 0);
        const int lag = peak_lag(in.outdoor, in.indoor, a_max_lag);
        out << "peak_lag     = " << lag << " samples (" << in.indoor.label << " lags " << in.outdoor.label << ")\n";
        if (!a_model.empty()) {
          const RomCoefficients c = read_model_file(a_model);
          const double spacing = uniform_spacing(in.indoor);
          const double e = objective(c, in.indoor, in.outdoor, SimConfig{spacing, IntegrationMethod::exact_zoh, 0.0, 0.0});
          out << "rmse_percent = " << fmt("%.6g", e) << "\n";
        }
      }
      return kOk;
    }

    if (*rep) {
      std::ifstream in(r_manifest, std::ios::binary);
      if (!in) throw DataError("cannot open manifest: " + r_manifest);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw DataError("manifest " + r_manifest + ": " + e.what());
      }
      if (!j.contains("argv") || !j["argv"].is_array()) throw DataError("manifest has no argv array");
      auto replay_args = j["argv"].get<std::vector<std::string>>();
      if (!replay_args.empty() && replay_args.front() == "replay") throw DataError("manifest records a replay");
      return run_cli(std::move(replay_args), out, err);
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace thermrom::cli

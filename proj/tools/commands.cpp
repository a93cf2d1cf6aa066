#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "holediff/error.hpp"

namespace holediff::cli {

namespace {

Rational parse_rational(const std::string& text, const char* what) {
  try {
    return Rational::parse(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

std::optional<Rational> opt(const std::optional<std::string>& text, const char* what) {
  if (!text) return std::nullopt;
  return parse_rational(*text, what);
}

std::pair<long, long> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const long v = std::stol(text);
      return {v, v};
    }
    return {std::stol(text.substr(0, colon)), std::stol(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("range '" + text + "' must look like first:last");
  }
}

std::vector<Cell> endpoint_cells(const ModelConfig& c) {
  return {Cell::exact(c.a1()), Cell::exact(c.a2()), Cell::exact(c.a3()), Cell::exact(c.a4())};
}

template <typename... Rest>
std::vector<Cell> row(std::vector<Cell> head, Rest&&... rest) {
  (head.insert(head.end(), rest.begin(), rest.end()), ...);
  return head;
}

void emit(const ScanTable& table, const std::string& format, std::ostream& out) {
  if (format == "json") {
    write_json_lines(table, out);
  } else {
    write_csv(table, out);
  }
}

}  // namespace

ModelConfig build_config(MapKind kind, Placement placement, const EndpointArgs& args) {
  auto a1 = opt(args.a1, "--a1");
  auto a2 = opt(args.a2, "--a2");
  auto a3 = opt(args.a3, "--a3");
  auto a4 = opt(args.a4, "--a4");
  const auto h = opt(args.h, "--h");

  switch (placement) {
    case Placement::Symmetric: {
      if (!a1 && a2 && h) a1 = *a2 - *h;
      if (!a1 && a4) a1 = 1 - *a4;
      if (!a2 && a1 && h) a2 = *a1 + *h;
      if (!a2 && a3) a2 = 1 - *a3;
      if (!a1 || !a2) throw ConfigError("symmetric holes need --a1 and --a2 (or --a1 and --h)");
      ModelConfig c = ModelConfig::symmetric(kind, *a1, *a2);
      if ((a3 && *a3 != c.a3()) || (a4 && *a4 != c.a4()) || (h && *h != c.hole_size())) {
        throw ConfigError("symmetric holes: --a3/--a4/--h inconsistent with --a1/--a2");
      }
      return c;
    }
    case Placement::NonSymmetricLeftAtZero: {
      if (a1 && !a1->is_zero()) throw ConfigError("non-symmetric holes need --a1 = 0");
      Rational size;
      if (h) {
        size = *h;
      } else if (a2) {
        size = *a2;
      } else if (a3 && a4) {
        size = *a4 - *a3;
      } else {
        throw ConfigError("non-symmetric holes need --h (or --a2)");
      }
      if (!a3 && a4) a3 = *a4 - size;
      if (!a3) throw ConfigError("non-symmetric holes need --a3");
      ModelConfig c = ModelConfig::non_symmetric(kind, size, *a3);
      if ((a2 && *a2 != c.a2()) || (a4 && *a4 != c.a4())) {
        throw ConfigError("non-symmetric holes: --a2/--a4 inconsistent with --h/--a3");
      }
      return c;
    }
    case Placement::General:
      if (!a1 || !a2 || !a3 || !a4) throw ConfigError("general placement needs --a1 .. --a4");
      return ModelConfig(kind, placement, *a1, *a2, *a3, *a4);
  }
  throw ConfigError("unknown placement");
}

std::vector<Rational> parse_h_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (item.rfind("2^-", 0) == 0) {
      const long k = parse_range(item.substr(3)).first;
      if (k < 0 || k > 1000) throw ConfigError("hole size exponent out of range: " + item);
      out.push_back(pow2_inverse(static_cast<unsigned>(k)));
    } else {
      out.push_back(parse_rational(item, "--h"));
    }
  }
  if (out.empty()) throw ConfigError("--h needs at least one hole size");
  return out;
}

std::vector<Rational> dyadic_h_range(const std::string& text) {
  const auto [first, last] = parse_range(text);
  if (first < 1 || last < first || last > 1000) throw ConfigError("--h-dyadic needs 1 <= kmin <= kmax");
  std::vector<Rational> out;
  for (long k = first; k <= last; ++k) out.push_back(pow2_inverse(static_cast<unsigned>(k)));
  return out;
}

std::vector<Rational> reciprocal_h_range(const std::string& text) {
  const auto [first, last] = parse_range(text);
  if (first < 2 || last < first) throw ConfigError("--h-reciprocal needs 2 <= nmin <= nmax");
  std::vector<Rational> out;
  for (long n = first; n <= last; ++n) out.push_back(Rational(1, n));
  return out;
}

std::vector<std::string> local_extrema(const std::vector<Rational>& values) {
  std::vector<std::string> out(values.size());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] < values[i - 1] && values[i] < values[i + 1]) out[i] = "min";
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) out[i] = "max";
  }
  return out;
}

ScanTable positions_table(MapKind kind, Placement placement, unsigned s) {
  if (s < 1 || s > 20) throw ConfigError("scan-positions: --s must be in [1, 20]");
  const PositionScan scan = scan_positions(kind, placement, s);
  ScanTable table(ScanKind::PositionScan, {"index", "a1", "a2", "a3", "a4", "D_exact", "D_float"});
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const Rational D = scan.D(i);
    table.add(row({Cell::integer(static_cast<std::int64_t>(i))}, endpoint_cells(scan.config(i)),
                  std::vector<Cell>{Cell::exact(D), Cell::real(D.to_double())}));
  }
  const Rational mean = scan.mean();
  table.add({Cell::str("mean"), Cell::empty(), Cell::empty(), Cell::empty(), Cell::empty(),
             Cell::exact(mean), Cell::real(mean.to_double())});
  return table;
}

ScanTable size_table(ModelFamily family, const Rational& point, LimitMode mode,
                     const std::vector<Rational>& h_values) {
  const auto samples = asymptotic_scan(family, point, mode, h_values);
  std::vector<Rational> D;
  for (const auto& s : samples) D.push_back(s.D);
  const auto flags = local_extrema(D);
  ScanTable table(ScanKind::SizeScan,
                  {"h", "a1", "a2", "a3", "a4", "D_exact", "D_float", "D_over_h", "J_exact",
                   "asymptote_exact", "asymptote_float", "extremum"});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    table.add(row({Cell::exact(s.h)}, endpoint_cells(s.config),
                  std::vector<Cell>{Cell::exact(s.D), Cell::real(s.D.to_double()),
                                    Cell::real((s.D / s.h).to_double()), Cell::exact(s.J),
                                    Cell::exact(s.prediction), Cell::real(s.prediction.to_double()),
                                    Cell::str(flags[i])}));
  }
  return table;
}

ScanTable phi_table(unsigned s, MapKind kind, Placement placement) {
  const PhiFunction phi = phi_cumulative(s, kind, placement);
  ScanTable table(ScanKind::Phi, {"k", "x", "phi_exact", "phi_float"});
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const Rational v = phi.value(k);
    table.add({Cell::integer(static_cast<std::int64_t>(k)), Cell::exact(phi.breakpoint(k)),
               Cell::exact(v), Cell::real(v.to_double())});
  }
  return table;
}

ScanTable escape_table(MapKind kind, Placement placement, unsigned s, double tol) {
  if (s < 1 || s > 20) throw ConfigError("escape: --s must be in [1, 20]");
  const EscapeScan escape = escape_scan(kind, placement, s, tol);
  const PositionScan positions = scan_positions(kind, placement, s);
  ScanTable table(ScanKind::Escape, {"index", "a1", "a2", "a3", "a4", "nu", "gamma", "iterations",
                                     "residual", "D_exact", "D_float"});
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const EscapeResult& r = escape.results[i];
    const Rational D = positions.D(i);
    table.add(row({Cell::integer(static_cast<std::int64_t>(i))}, endpoint_cells(positions.config(i)),
                  std::vector<Cell>{Cell::real(r.nu), Cell::real(r.gamma),
                                    Cell::integer(static_cast<std::int64_t>(r.iterations)),
                                    Cell::real(r.residual), Cell::exact(D),
                                    Cell::real(D.to_double())}));
  }
  const Rational mean_D = positions.mean();
  table.add(row({Cell::str("mean_arithmetic"), Cell::empty(), Cell::empty(), Cell::empty(),
                 Cell::empty(), Cell::empty(), Cell::real(escape.mean_arithmetic()), Cell::empty(),
                 Cell::empty(), Cell::exact(mean_D), Cell::real(mean_D.to_double())}));
  table.add({Cell::str("reference_2h"), Cell::empty(), Cell::empty(), Cell::empty(), Cell::empty(),
             Cell::empty(), Cell::real(escape.reference_2h()), Cell::empty(), Cell::empty(),
             Cell::empty(), Cell::empty()});
  return table;
}

ScanTable simulation_table(const MsdSeries& series) {
  ScanTable table(ScanKind::Simulation, {"n", "msd", "stderr", "survivors"});
  for (std::size_t k = 0; k < series.n.size(); ++k) {
    table.add({Cell::integer(static_cast<std::int64_t>(series.n[k])), Cell::real(series.msd[k]),
               Cell::real(series.stderr_[k]),
               Cell::integer(static_cast<std::int64_t>(series.survivors[k]))});
  }
  return table;
}

ScanTable po_table(const ExpansionResult& result) {
  ScanTable table(ScanKind::PoExpansion,
                  {"row", "point", "class", "period", "modified_length", "multiplicity", "J_exact",
                   "J_float", "value_exact", "value_float"});
  auto summary = [&](const char* name, const Rational& v) {
    table.add({Cell::str(name), Cell::empty(), Cell::empty(), Cell::empty(), Cell::empty(),
               Cell::empty(), Cell::empty(), Cell::empty(), Cell::exact(v), Cell::real(v.to_double())});
  };
  if (!result.terms.empty()) {
    for (const auto& t : result.terms) {
      const auto& c = t.classification;
      const unsigned period = c.orbit_class == OrbitClass::DyadicPreimage ? c.dyadic_exponent : c.period;
      table.add({Cell::str("term"), Cell::exact(t.point), Cell::str(std::string(to_string(c.orbit_class))),
                 Cell::integer(period), Cell::integer(t.modified_length), Cell::integer(1),
                 Cell::exact(t.J), Cell::real(t.J.to_double()), Cell::empty(), Cell::empty()});
    }
  } else {
    for (const auto& g : result.groups) {
      table.add({Cell::str("group"), Cell::empty(), Cell::str(std::string(to_string(g.orbit_class))),
                 Cell::integer(g.period), Cell::integer(g.modified_length),
                 Cell::integer(static_cast<std::int64_t>(g.multiplicity)), Cell::exact(g.J),
                 Cell::real(g.J.to_double()), Cell::empty(), Cell::empty()});
    }
  }
  summary("approximation", result.approximation);
  summary("exact", result.exact);
  summary("residual", result.residual);
  summary("p_max", Rational(static_cast<long>(result.max_length)));
  return table;
}

ScanTable diffusion_table(const ModelConfig& config) {
  const DiffusionResult r = diffusion_coefficient(config);
  ScanTable table(ScanKind::Diffusion, {"map_kind", "placement", "a1", "a2", "a3", "a4", "h",
                                        "D_exact", "D_float", "D_rw_exact"});
  table.add(row({Cell::str(std::string(to_string(config.kind()))),
                 Cell::str(std::string(to_string(config.placement())))},
                endpoint_cells(config),
                std::vector<Cell>{Cell::exact(config.hole_size()), Cell::exact(r.D),
                                  Cell::real(r.D.to_double()), Cell::exact(r.D_random_walk)}));
  return table;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact diffusion coefficients, escape rates and periodic-orbit asymptotics of "
               "lifted slope-two maps with holes",
               "holediff"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");

  std::string map_name = "doubling";
  std::string placement_name = "symmetric";
  std::string format = "csv";
  std::string out_path;
  unsigned s = 0;
  double tol = kDefaultEscapeTol;
  EndpointArgs endpoints;
  std::string point_text;
  std::string h_dyadic, h_reciprocal;
  bool center = false, fix_left = false, fix_right = false;
  unsigned pmax = 20;
  bool per_point = false;
  SimulationParams sim;
  double window = 0.5;
  std::string summary_path;
  bool with_escape = false;
  EscapeFitParams escape_fit;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--map", map_name, "doubling or tent")
        ->check(CLI::IsMember({"doubling", "bernoulli", "tent"}));
    sub->add_option("--placement", placement_name, "symmetric, nonsymmetric or general")
        ->check(CLI::IsMember({"symmetric", "nonsymmetric", "non-symmetric", "general"}));
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "output file (default: standard output)");
  };
  auto add_endpoints = [&](CLI::App* sub, bool with_h) {
    sub->add_option("--a1", endpoints.a1, "left end of I_L, e.g. 1/8");
    sub->add_option("--a2", endpoints.a2, "right end of I_L");
    sub->add_option("--a3", endpoints.a3, "left end of I_R");
    sub->add_option("--a4", endpoints.a4, "right end of I_R");
    if (with_h) sub->add_option("--h", endpoints.h, "hole size");
  };

  CLI::App* positions = app.add_subcommand("scan-positions", "D for every Markov hole of size 2^-s");
  add_common(positions);
  positions->add_option("--s", s, "scale")->required();

  CLI::App* size = app.add_subcommand("scan-size", "D against hole size around a point");
  add_common(size);
  size->add_option("--point", point_text, "limit point of the shrinking hole")->required();
  std::string h_list;
  auto* h_opt = size->add_option("--h", h_list, "comma-separated hole sizes, e.g. 1/12,2^-5");
  auto* hd_opt = size->add_option("--h-dyadic", h_dyadic, "hole sizes 2^-k for k in kmin:kmax");
  auto* hr_opt = size->add_option("--h-reciprocal", h_reciprocal, "hole sizes 1/n for n in nmin:nmax");
  h_opt->excludes(hd_opt)->excludes(hr_opt);
  hd_opt->excludes(hr_opt);
  auto* c_flag = size->add_flag("--center", center, "hole centred on the point (default)");
  auto* l_flag = size->add_flag("--fix-left", fix_left, "left hole end fixed at the point");
  auto* r_flag = size->add_flag("--fix-right", fix_right, "right hole end fixed at the point");
  c_flag->excludes(l_flag)->excludes(r_flag);
  l_flag->excludes(r_flag);

  CLI::App* phi = app.add_subcommand("phi", "cumulative position function at scale s");
  add_common(phi);
  phi->add_option("--s", s, "scale")->required();

  CLI::App* escape = app.add_subcommand("escape", "escape rate and D for every Markov position");
  add_common(escape);
  escape->add_option("--s", s, "scale")->required();
  escape->add_option("--tol", tol, "power iteration tolerance");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo mean square displacement");
  add_common(simulate);
  add_endpoints(simulate, true);
  simulate->add_option("--particles", sim.particles, "ensemble size");
  simulate->add_option("--steps", sim.steps, "time steps");
  simulate->add_option("--seed", sim.seed, "random seed");
  simulate->add_option("--window", window, "fit window as a fraction of the samples");
  simulate->add_option("--summary", summary_path, "write the summary JSON here (default: stderr)");
  simulate->add_flag("--escape", with_escape, "also fit the survival decay");
  simulate->add_option("--transient", escape_fit.transient, "steps skipped before the survival fit");

  CLI::App* po = app.add_subcommand("po-expansion", "periodic-orbit expansion of D");
  add_common(po);
  add_endpoints(po, true);
  po->add_option("--pmax", pmax, "maximal modified length");
  po->add_flag("--points", per_point, "one row per point instead of grouped rows");

  CLI::App* diffusion = app.add_subcommand("diffusion", "exact D for a single configuration");
  add_common(diffusion);
  add_endpoints(diffusion, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return static_cast<int>(ExitCode::Ok);
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return static_cast<int>(ExitCode::Ok);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InvalidConfig);
  }

  try {
    const MapKind kind = parse_map_kind(map_name);
    const Placement placement = parse_placement(placement_name);
    ScanTable table(ScanKind::Diffusion, {});
    std::optional<std::string> summary;

    if (positions->parsed()) {
      table = positions_table(kind, placement, s);
    } else if (size->parsed()) {
      std::vector<Rational> hs;
      if (!h_dyadic.empty()) {
        hs = dyadic_h_range(h_dyadic);
      } else if (!h_reciprocal.empty()) {
        hs = reciprocal_h_range(h_reciprocal);
      } else if (!h_list.empty()) {
        hs = parse_h_list(h_list);
      } else {
        throw ConfigError("scan-size needs --h, --h-dyadic or --h-reciprocal");
      }
      LimitMode mode = LimitMode::Interior;
      if (fix_left) mode = LimitMode::FixedLeftEndpoint;
      if (fix_right) mode = LimitMode::FixedRightEndpoint;
      table = size_table({kind, placement}, parse_rational(point_text, "--point"), mode, hs);
    } else if (phi->parsed()) {
      table = phi_table(s, kind, placement);
    } else if (escape->parsed()) {
      table = escape_table(kind, placement, s, tol);
    } else if (simulate->parsed()) {
      const ModelConfig config = build_config(kind, placement, endpoints);
      const MsdSeries series = simulate_ensemble(config, sim);
      table = simulation_table(series);
      const DiffusionEstimate est = estimate_D(series, window);
      nlohmann::ordered_json j;
      j["config"] = nlohmann::ordered_json::parse(config_to_json(config));
      j["particles"] = sim.particles;
      j["steps"] = sim.steps;
      j["seed"] = sim.seed;
      j["D_est"] = est.D;
      j["stderr"] = est.stderr_;
      j["intercept"] = est.intercept;
      j["fit_points"] = est.points;
      j["fit_n_first"] = est.n_first;
      j["fit_n_last"] = est.n_last;
      const Rational exact = diffusion_coefficient(config).D;
      j["D_exact"] = exact.str();
      j["D_exact_float"] = exact.to_double();
      if (with_escape) {
        const EscapeEstimate esc = estimate_escape(config, sim, escape_fit);
        j["gamma_est"] = esc.gamma;
        j["gamma_stderr"] = esc.stderr_;
        j["gamma_fit_n_first"] = esc.n_first;
        j["gamma_fit_n_last"] = esc.n_last;
      }
      summary = j.dump();
    } else if (po->parsed()) {
      const ModelConfig config = build_config(kind, placement, endpoints);
      table = po_table(po_expansion(config, pmax, per_point));
    } else if (diffusion->parsed()) {
      table = diffusion_table(build_config(kind, placement, endpoints));
    }

    if (out_path.empty()) {
      emit(table, format, out);
    } else {
      std::ofstream file(out_path);
      if (!file) throw std::runtime_error("cannot open " + out_path + " for writing");
      emit(table, format, file);
    }
    if (summary) {
      if (summary_path.empty()) {
        err << *summary << '\n';
      } else {
        std::ofstream file(summary_path);
        if (!file) throw std::runtime_error("cannot open " + summary_path + " for writing");
        file << *summary << '\n';
      }
    }
    return static_cast<int>(ExitCode::Ok);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (residual " << e.residual() << ")\n";
    return static_cast<int>(ExitCode::NoConvergence);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InvalidConfig);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InvalidConfig);
  } catch (const ResourceLimitError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InvalidConfig);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::InvalidConfig);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Failure);
  }
}

}  // namespace holediff::cli

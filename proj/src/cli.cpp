#include "waitsee/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>

#include "waitsee/analytic.hpp"
#include "waitsee/config_io.hpp"
#include "waitsee/lower_bound.hpp"
#include "waitsee/optimize.hpp"
#include "waitsee/simulator.hpp"

namespace waitsee::cli {

using nlohmann::json;

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Options {
  std::string config_path;
  bool json_out = false;
  std::optional<std::uint64_t> seed;
  std::string variable;
  std::string range;
  std::vector<std::string> strategies;
  std::optional<std::uint64_t> arrivals;
  std::optional<int> batches;
  std::string out_path;
};

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string vec_text(const Eigen::VectorXd& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s + ")";
}

json report_json(const DelayReport<double>& r) {
  json terms = json::object();
  for (const auto& t : r.terms) terms[t.name] = t.value;
  json doc{{"weighted_mean", r.weighted_mean}, {"terms", terms}, {"flags", describe(r.flags)}};
  if (r.per_station) doc["per_station"] = vec_json(*r.per_station);
  return doc;
}

void report_text(std::ostream& os, const std::string& name, const DelayReport<double>& r) {
  os << name << "  D=" << fmt(r.weighted_mean);
  if (r.flags != Flag::None) os << "  [" << describe(r.flags) << "]";
  os << '\n';
  for (const auto& t : r.terms) os << "  " << t.name << "  " << fmt(t.value) << '\n';
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"half_width", e.half_width}, {"batches", e.batches}}; }

std::string estimate_text(const Estimate& e) { return fmt(e.mean) + " +- " + fmt(e.half_width); }

Checked load_checked(const json& doc) { return validate(config_from_json(doc)); }

SimConfig sim_options(const json& doc, const Options& o) {
  SimConfig sim = sim_config_from_json(doc);
  if (o.seed) sim.seed = *o.seed;
  if (o.arrivals) sim.measured_arrivals = *o.arrivals;
  if (o.batches) sim.batches = *o.batches;
  if (!o.strategies.empty()) sim.strategy = strategy_from_string(o.strategies.front());
  return sim;
}

int cmd_evaluate(const json& doc, const Options& o, std::ostream& os) {
  const auto cfg = load_checked(doc);
  const auto ws = wait_and_see_delay(cfg);
  const auto ex = exhaustive_delay(cfg);
  std::optional<DelayReport<double>> special;
  std::string special_name;
  if (cfg.size() == 1) {
    special = single_station_delay(cfg);
    special_name = "single_station";
  } else if (cfg.size() == 2) {
    special = two_station_delay(cfg);
    special_name = "two_station";
  }
  const double ec = mean_cycle_time(cfg);
  if (o.json_out) {
    json d{{"wait_and_see", report_json(ws)}, {"exhaustive", report_json(ex)}, {"mean_cycle_time", ec},
           {"mg1_workload", mg1_workload(cfg)}};
    if (special) d[special_name] = report_json(*special);
    os << d.dump(2) << '\n';
  } else {
    report_text(os, "wait_and_see", ws);
    report_text(os, "exhaustive", ex);
    if (special) report_text(os, special_name, *special);
    os << "mean_cycle_time  " << fmt(ec) << '\n';
  }
  return kOk;
}

int cmd_optimize(const json& doc, const Options& o, std::ostream& os) {
  const auto cfg = load_checked(doc);
  if (cfg.size() == 2) {
    const auto d = optimal_credits_two_station(cfg);
    if (o.json_out) {
      json cond = json::object();
      for (const auto& t : d.condition_values) cond[t.name] = t.value;
      os << json{{"branch", d.branch},
                 {"symmetric", d.symmetric},
                 {"worth_waiting", {d.worth_waiting[0], d.worth_waiting[1]}},
                 {"t_opt", vec_json(d.t_opt)},
                 {"delay_opt", d.delay_opt},
                 {"exhaustive", d.exhaustive},
                 {"condition_values", cond},
                 {"message", d.message},
                 {"flags", describe(d.flags)}}
                .dump(2)
         << '\n';
    } else {
      os << "T*=" << vec_text(d.t_opt) << '\n';
      os << "delay*=" << fmt(d.delay_opt) << "  exhaustive=" << fmt(d.exhaustive) << '\n';
      os << d.message << '\n';
      os << "branch: " << d.branch << '\n';
      for (const auto& t : d.condition_values) os << "  " << t.name << "  " << fmt(t.value) << '\n';
    }
    return has(d.flags, Flag::DidNotConverge) ? kConvergence : kOk;
  }
  const auto g = optimal_credits_general(cfg);
  if (o.json_out) {
    os << json{{"t_opt", vec_json(g.t)},
               {"delay_opt", g.delay},
               {"exhaustive", exhaustive_delay(cfg).weighted_mean},
               {"kkt_residual", g.kkt_residual},
               {"iterations", g.iterations},
               {"flags", describe(g.flags)}}
              .dump(2)
       << '\n';
  } else {
    os << "T*=" << vec_text(g.t) << '\n';
    os << "delay*=" << fmt(g.delay) << "  exhaustive=" << fmt(exhaustive_delay(cfg).weighted_mean) << '\n';
    os << "kkt_residual=" << fmt(g.kkt_residual);
    if (g.flags != Flag::None) os << "  [" << describe(g.flags) << "]";
    os << '\n';
  }
  return has(g.flags, Flag::DidNotConverge) ? kConvergence : kOk;
}

int cmd_bound(const json& doc, const Options& o, std::ostream& os) {
  const auto cfg = load_checked(doc);
  const auto b = delay_lower_bound(cfg);
  if (o.json_out) {
    os << json{{"bound", b.bound},
               {"f_opt", vec_json(b.point.f)},
               {"alpha", vec_json(b.point.alpha)},
               {"unbounded", b.unbounded},
               {"kkt_residual", b.kkt_residual},
               {"flags", describe(b.flags)}}
              .dump(2)
       << '\n';
  } else {
    os << "bound=" << fmt(b.bound) << '\n';
    os << "f*=" << vec_text(b.point.f) << (b.unbounded ? "  (unbounded: infimum approached as f grows)" : "") << '\n';
    if (b.flags != Flag::None) os << "flags: " << describe(b.flags) << '\n';
  }
  return has(b.flags, Flag::DidNotConverge) ? kConvergence : kOk;
}

int cmd_simulate(const json& doc, const Options& o, std::ostream& os) {
  const auto cfg = load_checked(doc);
  const auto sim = sim_options(doc, o);
  const auto est = simulate(cfg, sim);
  if (o.json_out) {
    json per = json::array();
    for (const auto& e : est.per_station_delay) per.push_back(estimate_json(e));
    os << json{{"strategy", std::string(to_string(sim.strategy))},
               {"seed", sim.seed},
               {"weighted_delay", estimate_json(est.weighted_delay)},
               {"per_station_delay", per},
               {"mean_cycle", estimate_json(est.mean_cycle)},
               {"state_fractions",
                {{"working", estimate_json(est.state_fractions.working)},
                 {"switching", estimate_json(est.state_fractions.switching)},
                 {"waiting", estimate_json(est.state_fractions.waiting)}}},
               {"measured", est.measured},
               {"cycles", est.cycles},
               {"flags", describe(est.flags)}}
              .dump(2)
       << '\n';
  } else {
    os << "strategy " << to_string(sim.strategy) << "  seed " << sim.seed << '\n';
    os << "weighted_delay  " << estimate_text(est.weighted_delay) << '\n';
    for (std::size_t i = 0; i < est.per_station_delay.size(); ++i)
      os << "  station " << i << "  " << estimate_text(est.per_station_delay[i]) << '\n';
    os << "mean_cycle  " << estimate_text(est.mean_cycle) << '\n';
    os << "fractions  working " << fmt(est.state_fractions.working.mean) << "  switching "
       << fmt(est.state_fractions.switching.mean) << "  waiting " << fmt(est.state_fractions.waiting.mean) << '\n';
    if (est.flags != Flag::None) os << "flags: " << describe(est.flags) << '\n';
  }
  return has(est.flags, Flag::UnstableDetected) ? kConvergence : kOk;
}

struct SweepVariable {
  enum Kind { Credit, Lambda, Switch, Load } kind;
  std::size_t index;  // 0-based
};

SweepVariable parse_variable(const std::string& text, std::size_t n) {
  static const std::regex re("^(T|lambda|r|rho)([0-9]+)$");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw CLI::ValidationError("--variable", "expected T<i>, lambda<i>, r<i> or rho<i>");
  const auto i = std::stoul(m[2].str());
  if (i < 1 || i > n) throw CLI::ValidationError("--variable", "station index out of range");
  const std::string k = m[1].str();
  const auto kind = k == "T" ? SweepVariable::Credit
                    : k == "lambda" ? SweepVariable::Lambda
                    : k == "r"      ? SweepVariable::Switch
                                    : SweepVariable::Load;
  return {kind, i - 1};
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw CLI::ValidationError("--range", "expected start:stop:steps");
  double a = 0, b = 0;
  long steps = 0;
  try {
    std::size_t pos = 0;
    a = std::stod(parts[0], &pos);
    if (pos != parts[0].size()) throw std::invalid_argument("start");
    b = std::stod(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument("stop");
    steps = std::stol(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument("steps");
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--range", "expected start:stop:steps");
  }
  if (steps < 2) throw CLI::ValidationError("--range", "steps must be at least 2");
  std::vector<double> pts;
  for (long k = 0; k < steps; ++k) pts.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(steps - 1));
  return pts;
}

Config apply_point(Config cfg, const SweepVariable& v, double x) {
  auto& s = cfg.stations[v.index];
  switch (v.kind) {
    case SweepVariable::Credit: s.T = x; break;
    case SweepVariable::Lambda: s.lambda = x; break;
    case SweepVariable::Load: s.lambda = x / s.b; break;
    case SweepVariable::Switch: {
      auto& w = cfg.switchovers[v.index];
      if (w.r > 0) {
        const double k = x / w.r;
        w = {x, w.r2 * k * k, w.deterministic};
      } else {
        w = SwitchoverMoments<double>::fixed(x);
      }
      break;
    }
  }
  return cfg;
}

int cmd_sweep(const json& doc, const Options& o, std::ostream& os) {
  const Config base = config_from_json(doc);
  if (o.variable.empty() || o.range.empty()) throw CLI::ValidationError("sweep", "--variable and --range are required");
  const auto var = parse_variable(o.variable, base.size());
  const auto points = parse_range(o.range);

  std::vector<Strategy> strategies;
  for (const auto& s : o.strategies) strategies.push_back(strategy_from_string(s));
  const SimConfig sim_base = sim_options(doc, o);

  std::vector<std::string> columns{"analytic_ws", "exhaustive", "lower_bound"};
  for (auto s : strategies) {
    columns.push_back("sim_" + std::string(to_string(s)));
    columns.push_back("sim_" + std::string(to_string(s)) + "_hw");
  }

  std::vector<std::vector<std::optional<double>>> rows;
  int status = kOk;
  for (double x : points) {
    std::vector<std::optional<double>> row(columns.size());
    try {
      const auto cfg = validate(apply_point(base, var, x));
      row[0] = wait_and_see_delay(cfg).weighted_mean;
      row[1] = exhaustive_delay(cfg).weighted_mean;
      const auto lb = delay_lower_bound(cfg);
      row[2] = lb.bound;
      if (has(lb.flags, Flag::DidNotConverge)) status = kConvergence;
      for (std::size_t k = 0; k < strategies.size(); ++k) {
        SimConfig sim = sim_base;
        sim.strategy = strategies[k];
        try {
          resolve_distributions(cfg, sim);
        } catch (const PollingError& e) {
          if (e.kind() != ErrorKind::MomentMismatch) throw;
          sim.service.clear();
          sim.switchover.clear();
        }
        const auto est = simulate(cfg, sim);
        if (has(est.flags, Flag::UnstableDetected)) continue;
        row[3 + 2 * k] = est.weighted_delay.mean;
        row[4 + 2 * k] = est.weighted_delay.half_width;
      }
    } catch (const PollingError&) {
      // invalid point: left as a gap
    }
    rows.push_back(std::move(row));
  }

  if (o.json_out) {
    json arr = json::array();
    for (std::size_t p = 0; p < points.size(); ++p) {
      json r{{"point", points[p]}};
      for (std::size_t c = 0; c < columns.size(); ++c) r[columns[c]] = rows[p][c] ? json(*rows[p][c]) : json(nullptr);
      arr.push_back(r);
    }
    os << json{{"variable", o.variable}, {"rows", arr}}.dump(2) << '\n';
  } else {
    os << "point";
    for (const auto& c : columns) os << ',' << c;
    os << '\n';
    for (std::size_t p = 0; p < points.size(); ++p) {
      os << format_full(points[p]);
      for (const auto& cell : rows[p]) os << ',' << (cell ? format_full(*cell) : "");
      os << '\n';
    }
  }
  return status;
}

int exit_for(ErrorKind kind) { return kind == ErrorKind::Io ? kIo : kValidation; }

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cyclic polling with wait-and-see credits: evaluate, optimize, bound, simulate, sweep", "waitsee"};
  app.fallthrough();
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "configuration JSON")->required();
  app.add_flag("--json", o.json_out, "emit JSON instead of text/CSV");
  app.add_option("--seed", o.seed, "simulation seed");
  app.add_option("--variable", o.variable, "sweep variable: T<i>, lambda<i>, r<i>, rho<i> (1-based)");
  app.add_option("--range", o.range, "sweep grid start:stop:steps");
  app.add_option("--strategy", o.strategies, "wait_and_see | total_timer | boxma_timer | exhaustive (repeatable in sweep)");
  app.add_option("--arrivals", o.arrivals, "measured arrivals per simulation");
  app.add_option("--batches", o.batches, "batch count for confidence intervals");
  app.add_option("--out", o.out_path, "write the document to this file");
  auto* evaluate = app.add_subcommand("evaluate", "closed-form delays and their terms");
  auto* optimize = app.add_subcommand("optimize", "optimal credits");
  auto* bound = app.add_subcommand("bound", "lower bound over all current-station strategies");
  auto* simulate_cmd = app.add_subcommand("simulate", "discrete-event simulation");
  auto* sweep = app.add_subcommand("sweep", "evaluate along a parameter grid");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsage;
  }

  std::ofstream file;
  if (!o.out_path.empty()) {
    file.open(o.out_path);
    if (!file) {
      err << "cannot write '" << o.out_path << "'\n";
      return kIo;
    }
  }
  std::ostream& os = o.out_path.empty() ? out : file;

  try {
    const json doc = load_json_file(o.config_path);
    int status = kOk;
    if (evaluate->parsed()) status = cmd_evaluate(doc, o, os);
    else if (optimize->parsed()) status = cmd_optimize(doc, o, os);
    else if (bound->parsed()) status = cmd_bound(doc, o, os);
    else if (simulate_cmd->parsed()) status = cmd_simulate(doc, o, os);
    else if (sweep->parsed()) status = cmd_sweep(doc, o, os);
    os.flush();
    if (!os) {
      err << "write failed\n";
      return kIo;
    }
    return status;
  } catch (const CLI::ValidationError& e) {
    err << e.what() << '\n';
    return kUsage;
  } catch (const PollingError& e) {
    err << e.what() << '\n';
    return exit_for(e.kind());
  } catch (const json::exception& e) {
    err << "Parse: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace waitsee::cli

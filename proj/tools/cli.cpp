#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpgates/catalog.hpp"
#include "cpgates/designer.hpp"
#include "cpgates/io.hpp"
#include "cpgates/jet.hpp"
#include "cpgates/landscape.hpp"
#include "cpgates/optimizer.hpp"

namespace cpg::cli {

namespace {

/// Bad user input; reported with exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

/// p/q with q <= 12 when x is that rational to 1e-10, otherwise a decimal.
std::string rational(double x) {
  for (int q = 1; q <= 12; ++q) {
    const double p = std::round(x * q);
    if (std::fabs(x * q - p) < 1e-10 * q) {
      if (q == 1) return fmt("%.0f", p);
      if (std::gcd(static_cast<long>(std::fabs(p)), static_cast<long>(q)) != 1) continue;
      return fmt("%.0f", p) + "/" + std::to_string(q);
    }
  }
  return fmt("%.6f", x);
}

/// Phase in units of pi, folded to (-1, 1].
double signed_phase_over_pi(double phase) {
  double q = phase / kPi;
  if (q > 1.0 + 1e-12) q -= 2.0;
  return q;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw UsageError(what + ": empty list");
  return out;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what);
  if (v.size() != 2) throw UsageError(what + ": expected lo,hi");
  if (!(v[0] < v[1])) throw UsageError(what + ": lo must be smaller than hi");
  return {v[0], v[1]};
}

GridSize parse_resolution(const std::string& text, const std::string& what, int min) {
  int a = 0;
  int b = 0;
  char x = 0;
  std::istringstream in(text);
  in >> a;
  if (!in) throw UsageError(what + ": '" + text + "' is not N or NxM");
  if (in >> x) {
    if ((x != 'x' && x != 'X') || !(in >> b)) throw UsageError(what + ": '" + text + "' is not N or NxM");
  } else {
    b = a;
  }
  if (a < min || b < min) throw UsageError(what + ": each dimension must be at least " + std::to_string(min));
  return {a, b};
}

std::vector<DerivativeOrder> parse_conditions(const std::string& text) {
  std::vector<DerivativeOrder> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(item);
      out.push_back({std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw UsageError("--conditions: '" + item + "' is not of the form m:n");
    }
  }
  return out;
}

GateKind parse_target(const std::string& text) {
  try {
    return parse_gate_kind(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--target: ") + e.what());
  }
}

struct LoadedSequence {
  CompositeSequence sequence;
  std::vector<DerivativeOrder> claimed;
  std::string provenance;
};

LoadedSequence load_sequence(const std::string& name, const std::string& file) {
  if (!name.empty() && !file.empty()) throw UsageError("give either a sequence name or --file, not both");
  if (!file.empty()) {
    std::string text;
    try {
      text = read_text_file(file);
    } catch (const std::exception&) {
      throw UsageError("--file: cannot read '" + file + "'");
    }
    try {
      auto sf = sequence_from_json(text);
      return {sf.sequence, sf.claimed_orders, sf.provenance};
    } catch (const FormatError& e) {
      throw UsageError("--file: " + std::string(e.what()));
    }
  }
  if (name.empty()) throw UsageError("a sequence name or --file is required");
  try {
    const auto& rec = catalog_get(name);
    return {rec.sequence, rec.claimed_orders, rec.source};
  } catch (const NotFoundError& e) {
    throw UsageError(e.what());
  }
}

void write_output(const std::string& path, const std::string& content, const std::string& option) {
  try {
    write_file_atomic(path, content);
  } catch (const std::exception& e) {
    throw std::runtime_error(option + ": " + e.what());
  }
}

std::string describe_phases(const CompositeSequence& seq) {
  std::string s;
  for (const auto& p : seq.pulses()) {
    if (!s.empty()) s += ", ";
    s += rational(signed_phase_over_pi(p.phase()));
  }
  return "(" + s + ")pi";
}

std::string describe_orders(const std::vector<DerivativeOrder>& orders) {
  if (orders.empty()) return "none";
  std::string s;
  for (const auto& o : orders) {
    if (!s.empty()) s += " ";
    s += "D" + std::to_string(o.eps) + "," + std::to_string(o.delta);
  }
  return s;
}

// ---- key=value configuration ----------------------------------------------

std::map<std::string, std::string> read_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception&) {
    throw UsageError("--config: cannot read '" + path + "'");
  }
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("--config: line " + std::to_string(n) + " is not key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

/// Feeds config values into options the command line left unset.
void apply_config(const std::map<std::string, std::string>& kv, CLI::App& app, CLI::App* leaf) {
  for (const auto& [key, value] : kv) {
    CLI::Option* opt = leaf ? leaf->get_option_no_throw("--" + key) : nullptr;
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt || key == "config") {
      throw UsageError("--config: unknown key '" + key + "' for this command");
    }
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("--config: key '" + key + "': " + e.what());
    }
  }
}

// ---- subcommands ------------------------------------------------------------

struct Options {
  std::string config;
  int threads = 0;

  std::string list_target;
  std::string show_name;
  std::string export_path;

  std::string seq_name;
  std::string seq_file;
  std::string target;
  double box = 0.5;
  std::string eps_range;
  std::string delta_range;
  std::string resolution = "201";
  std::string levels = "1e-4,1e-3,1e-2,1e-1";
  std::string out;
  std::string contours_out;
  std::string svg_out;

  int max_order = 3;
  double tol = 1e-9;

  int pulses = 5;
  std::string conditions = "1:0,0:1,1:1";
  int starts = 256;
  int opt_starts = 64;
  std::uint64_t seed = 0;
  int rank_resolution = 101;
  std::string out_dir;

  bool symmetric = false;
  bool fixed_amplitude = false;
  std::string amplitude_bounds;
  double tau = 0.0;
  double opt_box = 0.15;
  std::string grid = "8";
  double lr = 1e-3;
  double clip = 1.0;
  int max_iters = 20000;
  int patience = 200;
  double area_penalty = 0.0;
  std::string report;

  std::string eta_range = "-0.2,0.2";
  int samples = 81;
  double eps = 0.0;
  double delta = 0.0;
};

int cmd_catalog_list(const Options& o, std::ostream& out) {
  std::optional<GateKind> filter;
  if (!o.list_target.empty()) filter = parse_target(o.list_target);
  for (const auto& name : Catalog::instance().list(filter)) out << name << "\n";
  return kExitOk;
}

int cmd_catalog_show(const Options& o, std::ostream& out) {
  const SequenceRecord* rec = nullptr;
  try {
    rec = &catalog_get(o.show_name);
  } catch (const NotFoundError& e) {
    throw UsageError(e.what());
  }
  const auto& s = rec->sequence;
  out << "name:        " << s.name() << "\n";
  out << "target:      " << to_string(s.target()) << "\n";
  out << "pulses:      " << s.size() << (s.symmetric() ? " (palindromic)" : "") << "\n";
  out << "phases:      " << describe_phases(s) << "\n";
  out << "omega:       ";
  for (std::size_t i = 0; i < s.size(); ++i) out << (i ? ", " : "") << fmt("%.6g", s.pulses()[i].omega());
  out << "\n";
  out << "tau:         ";
  for (std::size_t i = 0; i < s.size(); ++i) out << (i ? ", " : "") << fmt("%.6g", s.pulses()[i].tau());
  out << "\n";
  out << "area:        " << fmt("%.4f", rec->nominal_area) << " pi";
  if (rec->printed_area) out << " (tabulated " << fmt("%.4f", *rec->printed_area) << " pi)";
  out << "\n";
  out << "provenance:  " << rec->source << "\n";
  out << "claimed:     " << describe_orders(rec->claimed_orders) << "\n";
  if (!rec->notes.empty()) out << "notes:       " << rec->notes << "\n";
  const double inf0 = sequence_infidelity(s, s.target(), {});
  out << "infidelity at origin: " << fmt("%.3e", inf0) << "\n";
  if (!o.export_path.empty()) {
    write_output(o.export_path, sequence_to_json(to_sequence_file(*rec)), "--export");
    out << "wrote " << o.export_path << "\n";
  }
  return kExitOk;
}

int cmd_landscape(const Options& o, std::ostream& out) {
  const auto loaded = load_sequence(o.seq_name, o.seq_file);
  const GateKind target = o.target.empty() ? loaded.sequence.target() : parse_target(o.target);
  if (!(o.box > 0.0)) throw UsageError("--box: half-width must be positive");
  ErrorBox box = ErrorBox::square(o.box);
  if (!o.eps_range.empty()) std::tie(box.eps_lo, box.eps_hi) = parse_range(o.eps_range, "--eps-range");
  if (!o.delta_range.empty()) std::tie(box.delta_lo, box.delta_hi) = parse_range(o.delta_range, "--delta-range");
  const GridSize res = parse_resolution(o.resolution, "--resolution", 2);
  const auto levels = parse_list(o.levels, "--levels");
  for (double l : levels) {
    if (!(l > 0.0)) throw UsageError("--levels: levels must be positive");
  }

  const LandscapeGrid grid = eval_grid(loaded.sequence, target, box, res, o.threads);
  const ContourSet cs = contours(grid, levels);
  out << "sequence " << loaded.sequence.name() << ", target " << to_string(target) << ", grid " << res.n_eps << "x"
      << res.n_delta << "\n";
  out << "infidelity at (0,0): " << fmt("%.3e", sequence_infidelity(loaded.sequence, target, {})) << "\n";
  out << "grid min/max: " << fmt("%.3e", grid.values.minCoeff()) << " / " << fmt("%.3e", grid.values.maxCoeff())
      << "\n";
  for (std::size_t k = 0; k < levels.size(); ++k) {
    std::size_t closed = 0;
    for (const auto& pl : cs.lines[k]) closed += pl.closed ? 1 : 0;
    out << "level " << fmt("%g", levels[k]) << ": fraction below " << fmt("%.4f", robust_fraction(grid, levels[k]))
        << ", " << cs.lines[k].size() << " polylines (" << closed << " closed)\n";
  }
  if (!o.out.empty()) {
    write_output(o.out, grid_to_csv(grid), "--out");
    out << "wrote " << o.out << "\n";
  }
  if (!o.contours_out.empty()) {
    write_output(o.contours_out, contours_to_json(cs), "--contours");
    out << "wrote " << o.contours_out << "\n";
  }
  if (!o.svg_out.empty()) {
    write_output(o.svg_out, contours_to_svg(grid, cs, loaded.sequence.name()), "--svg");
    out << "wrote " << o.svg_out << "\n";
  }
  return kExitOk;
}

/// True for a five-pulse palindrome of resonant pi pulses.
bool is_five_pulse_anagram(const CompositeSequence& s) {
  if (s.size() != 5 || !s.symmetric()) return false;
  return std::all_of(s.pulses().begin(), s.pulses().end(),
                     [](const Pulse& p) { return p.omega() == 1.0 && p.tau() == 1.0; });
}

int cmd_verify(const Options& o, std::ostream& out) {
  const auto loaded = load_sequence(o.seq_name, o.seq_file);
  if (o.max_order < 1 || o.max_order > 6) throw UsageError("--max-order: must be between 1 and 6");
  if (!(o.tol > 0.0)) throw UsageError("--tol: must be positive");
  const auto& s = loaded.sequence;
  const UnitaryJet jet = sequence_jet(s, std::max(kDefaultJetOrder, o.max_order));
  const double inf0 = sequence_infidelity(s, s.target(), {});

  nlohmann::json report;
  report["sequence"] = s.name();
  report["target"] = to_string(s.target());
  report["tolerance"] = o.tol;
  report["infidelity_at_origin"] = inf0;
  out << "sequence " << s.name() << " (" << s.size() << " pulses), target " << to_string(s.target()) << "\n";
  out << "infidelity at origin: " << fmt("%.3e", inf0) << "\n";
  out << "derivative norms (Frobenius), vanishing below " << fmt("%g", o.tol) << ":\n";

  std::vector<DerivativeOrder> vanishing;
  nlohmann::json rows = nlohmann::json::array();
  for (int total = 1; total <= o.max_order; ++total) {
    for (int m = total; m >= 0; --m) {
      const int n = total - m;
      const double norm = derivative_matrix(jet, m, n).norm();
      const bool zero = norm < o.tol;
      if (zero) vanishing.push_back({m, n});
      out << "  D" << m << "," << n << "  " << fmt("%.3e", norm) << (zero ? "  vanishes" : "") << "\n";
      rows.push_back({{"m", m}, {"n", n}, {"norm", norm}, {"vanishes", zero}});
    }
  }
  report["derivatives"] = rows;

  bool claims_ok = true;
  nlohmann::json claimed = nlohmann::json::array();
  for (const auto& c : loaded.claimed) {
    if (c.total() > o.max_order) continue;
    const bool ok = std::find(vanishing.begin(), vanishing.end(), c) != vanishing.end();
    claims_ok = claims_ok && ok;
    claimed.push_back({c.eps, c.delta});
  }
  out << "claimed orders: " << describe_orders(loaded.claimed) << " -> " << (claims_ok ? "confirmed" : "NOT confirmed")
      << "\n";
  out << "observed vanishing orders: " << describe_orders(vanishing) << "\n";
  report["claimed_orders"] = claimed;
  report["claims_confirmed"] = claims_ok;
  nlohmann::json observed = nlohmann::json::array();
  for (const auto& v : vanishing) observed.push_back({v.eps, v.delta});
  report["observed_vanishing_orders"] = observed;

  if (is_five_pulse_anagram(s)) {
    const auto b = five_pulse_bracket_check(s.pulses()[0].phase(), s.pulses()[1].phase());
    const double p3 = wrap_phase(2.0 * b.phi2 - 2.0 * b.phi1);
    const bool constrained = std::fabs(std::remainder(p3 - s.pulses()[2].phase(), kTwoPi)) < 1e-9;
    out << "five-pulse bracket check (center phase " << (constrained ? "satisfies" : "does NOT satisfy")
        << " p3 = 2 p2 - 2 p1):\n";
    out << "  printed D10 bracket 1 - 2cos p1 + 2cos(2p1 - p2) = " << fmt("%.6f", b.published_d10_bracket) << "\n";
    out << "  printed D01 bracket 1 + 2cos p1 - 2cos(2p1 - p2) = " << fmt("%.6f", b.published_d01_bracket) << "\n";
    out << "  sum of printed brackets = " << fmt("%.6f", b.published_d10_bracket + b.published_d01_bracket)
        << " (identically 2, so both cannot vanish)\n";
    out << "  consistent D10 bracket 1 + 2cos p1 + 2cos(2p1 - p2) = " << fmt("%.6f", b.consistent_d10_bracket)
        << "\n";
    out << "  jet D10 U11 = " << fmt("%.3e", std::abs(b.jet_d10_u11)) << " (abs), -(pi/2) x consistent bracket = "
        << fmt("%.3e", -0.5 * kPi * b.consistent_d10_bracket) << "\n";
    out << "  jet D01 U11 = " << fmt("%.3e", std::abs(b.jet_d01_u11)) << " (abs)\n";
    report["five_pulse_bracket_check"] = {{"published_d10_bracket", b.published_d10_bracket},
                                          {"published_d01_bracket", b.published_d01_bracket},
                                          {"consistent_d10_bracket", b.consistent_d10_bracket},
                                          {"jet_d10_u11", {b.jet_d10_u11.real(), b.jet_d10_u11.imag()}},
                                          {"jet_d01_u11", {b.jet_d01_u11.real(), b.jet_d01_u11.imag()}},
                                          {"center_constraint_holds", constrained}};
  }
  if (!o.out.empty()) {
    write_output(o.out, report.dump(2) + "\n", "--out");
    out << "wrote " << o.out << "\n";
  }
  return claims_ok ? kExitOk : kExitFailure;
}

int cmd_design(const Options& o, std::ostream& out) {
  if (o.pulses < 1 || o.pulses % 2 == 0) throw UsageError("--pulses: must be a positive odd number");
  if (o.starts < 1) throw UsageError("--starts: must be at least 1");
  if (!(o.tol > 0.0)) throw UsageError("--tol: must be positive");
  if (o.rank_resolution < 2) throw UsageError("--rank-resolution: must be at least 2");
  DesignProblem prob;
  try {
    prob = DesignProblem(o.pulses, ConditionSet(parse_conditions(o.conditions)));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--conditions: ") + e.what());
  }
  DesignOptions opts;
  opts.starts = o.starts;
  opts.seed = o.seed;
  opts.tol = o.tol;
  opts.threads = o.threads;
  opts.rank_resolution = o.rank_resolution;
  const auto sols = design_symmetric(prob, opts);
  out << sols.size() << " distinct solution(s) for " << o.pulses << " pulses, conditions "
      << describe_orders(prob.conditions.orders()) << "\n";
  for (std::size_t k = 0; k < sols.size(); ++k) {
    const auto seq = anagram_sequence("design-" + std::to_string(k + 1), sols[k].half_phases);
    out << "  #" << k + 1 << "  phases/pi:";
    for (double p : sols[k].half_phases) out << " " << fmt("%.10f", signed_phase_over_pi(p));
    out << "  residual " << fmt("%.1e", sols[k].residual_inf) << "  robust fraction "
        << fmt("%.4f", sols[k].robust_fraction) << "\n";
    if (!o.out_dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(o.out_dir, ec);
      if (ec) throw std::runtime_error("--out-dir: " + ec.message());
      SequenceFile sf{kSequenceSchemaVersion, seq, "symmetric design, conditions " + describe_orders(prob.conditions.orders()),
                      prob.conditions.orders()};
      const auto path = std::filesystem::path(o.out_dir) / (seq.name() + ".json");
      write_output(path.string(), sequence_to_json(sf), "--out-dir");
    }
  }
  return kExitOk;
}

int cmd_optimize(const Options& o, std::ostream& out) {
  const GateKind target = parse_target(o.target.empty() ? "x" : o.target);
  if (target == GateKind::I) throw UsageError("--target: optimizer targets are x, rx90 or h");
  if (o.pulses < 1) throw UsageError("--pulses: must be at least 1");
  OptimizerSpec spec = OptimizerSpec::defaults(o.pulses, target);
  if (o.tau != 0.0) {
    if (!(o.tau > 0.0)) throw UsageError("--tau: must be positive");
    spec.tau = o.tau;
    spec.amplitude_hi = 2.0 / o.tau;
    spec.fixed_omega = 1.0 / o.tau;
  }
  if (!o.amplitude_bounds.empty()) {
    const auto v = parse_list(o.amplitude_bounds, "--amplitude-bounds");
    if (v.size() != 2 || v[0] < 0.0 || v[1] < v[0]) throw UsageError("--amplitude-bounds: expected 0 <= lo <= hi");
    spec.amplitude_lo = v[0];
    spec.amplitude_hi = v[1];
  }
  spec.symmetric = o.symmetric;
  spec.vary_amplitudes = !o.fixed_amplitude;
  if (!(o.opt_box > 0.0)) throw UsageError("--box: half-width must be positive");
  spec.box = ErrorBox::square(o.opt_box);
  spec.grid = parse_resolution(o.grid, "--grid", 1);
  if (!(o.lr > 0.0)) throw UsageError("--lr: must be positive");
  if (!(o.clip > 0.0)) throw UsageError("--clip: must be positive");
  if (o.opt_starts < 1) throw UsageError("--starts: must be at least 1");
  if (o.max_iters < 0) throw UsageError("--max-iters: must be non-negative");
  if (o.patience < 1) throw UsageError("--patience: must be at least 1");
  if (!(o.area_penalty >= 0.0)) throw UsageError("--area-penalty: must be non-negative");
  spec.learning_rate = o.lr;
  spec.clip_norm = o.clip;
  spec.starts = o.opt_starts;
  spec.max_iters = o.max_iters;
  spec.patience = o.patience;
  spec.seed = o.seed;
  spec.area_penalty = o.area_penalty;
  spec.threads = o.threads;

  const OptResult res = optimize(spec);
  const CompositeSequence best = params_to_sequence(res.params, spec, "optimized");
  out << "objective " << fmt("%.6e", res.objective) << " (best of " << spec.starts << " starts, start "
      << res.best_start << ")\n";
  out << "area " << fmt("%.4f", best.total_area()) << " pi\n";
  for (std::size_t i = 0; i < best.size(); ++i) {
    const auto& p = best.pulses()[i];
    out << "  pulse " << i + 1 << ": omega*tau " << fmt("%.6f", p.area()) << "  phase/pi "
        << fmt("%.6f", p.phase() / kPi) << "\n";
  }
  if (!o.out.empty()) {
    SequenceFile sf{kSequenceSchemaVersion, best, "optimized, objective " + fmt("%.6e", res.objective), {}};
    write_output(o.out, sequence_to_json(sf), "--out");
    out << "wrote " << o.out << "\n";
  }
  if (!o.report.empty()) {
    write_output(o.report, optimization_report_json(spec, res, best), "--report");
    out << "wrote " << o.report << "\n";
  }
  return kExitOk;
}

int cmd_scan_duration(const Options& o, std::ostream& out) {
  const auto loaded = load_sequence(o.seq_name, o.seq_file);
  const GateKind target = o.target.empty() ? loaded.sequence.target() : parse_target(o.target);
  const auto [lo, hi] = parse_range(o.eta_range, "--eta-range");
  if (o.samples < 2) throw UsageError("--samples: must be at least 2");
  std::string csv = "eta,infidelity\n";
  for (double eta : axis_samples(lo, hi, o.samples)) {
    const ErrorPoint e = duration_error_map({o.eps, o.delta}, eta);
    csv += fmt("%.12e", eta) + "," + fmt("%.12e", sequence_infidelity(loaded.sequence, target, e)) + "\n";
  }
  if (o.out.empty()) {
    out << csv;
  } else {
    write_output(o.out, csv, "--out");
    out << "wrote " << o.out << "\n";
  }
  return kExitOk;
}

void add_sequence_source(CLI::App* sub, Options& o) {
  sub->add_option("name", o.seq_name, "Catalog sequence name");
  sub->add_option("--sequence", o.seq_name, "Catalog sequence name");
  sub->add_option("--file", o.seq_file, "Sequence file (JSON)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Composite pulse gates: catalog, verification, design, optimization and landscapes", "cpgates"};
  app.require_subcommand(1);
  app.add_option("--config", o.config, "key=value file supplying defaults for options not given");
  app.add_option("--threads", o.threads, "Worker threads (0: all cores); results do not depend on it");

  auto* catalog = app.add_subcommand("catalog", "Query the sequence catalog");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "List sequence names");
  list->add_option("--target", o.list_target, "Only sequences with this target (x, rx90)");
  auto* show = catalog->add_subcommand("show", "Show one sequence");
  show->add_option("name", o.show_name, "Sequence name")->required();
  show->add_option("--export", o.export_path, "Also write the sequence file here");

  auto* landscape = app.add_subcommand("landscape", "Infidelity grid and contours over an error box");
  add_sequence_source(landscape, o);
  landscape->add_option("--target", o.target, "x, rx90 or h (default: the sequence's target)");
  landscape->add_option("--box", o.box, "Half-width of the square (eps, delta) box")->capture_default_str();
  landscape->add_option("--eps-range", o.eps_range, "lo,hi for epsilon (overrides --box)");
  landscape->add_option("--delta-range", o.delta_range, "lo,hi for delta (overrides --box)");
  landscape->add_option("--resolution", o.resolution, "N or NxM grid nodes")->capture_default_str();
  landscape->add_option("--levels", o.levels, "Comma-separated contour levels")->capture_default_str();
  landscape->add_option("--out", o.out, "Grid CSV output");
  landscape->add_option("--contours", o.contours_out, "Contour JSON output");
  landscape->add_option("--svg", o.svg_out, "SVG contour picture");

  auto* verify = app.add_subcommand("verify", "Derivative-cancellation report");
  add_sequence_source(verify, o);
  verify->add_option("--max-order", o.max_order, "Highest total derivative order")->capture_default_str();
  verify->add_option("--tol", o.tol, "Norm below which a derivative counts as vanishing")->capture_default_str();
  verify->add_option("--out", o.out, "JSON report output");

  auto* design = app.add_subcommand("design", "Symmetric pi-pulse phase design");
  design->add_option("--pulses", o.pulses, "Odd number of pulses")->capture_default_str();
  design->add_option("--conditions", o.conditions, "Derivative orders m:n to cancel")->capture_default_str();
  design->add_option("--starts", o.starts, "Random starts")->capture_default_str();
  design->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  design->add_option("--tol", o.tol, "Residual tolerance")->capture_default_str();
  design->add_option("--rank-resolution", o.rank_resolution, "Grid used for robustness ranking")
      ->capture_default_str();
  design->add_option("--out-dir", o.out_dir, "Write each solution as a sequence file");

  auto* opt = app.add_subcommand("optimize", "Multi-start projected Adam on the average infidelity");
  opt->add_option("--pulses", o.pulses, "Number of pulses")->capture_default_str();
  opt->add_option("--target", o.target, "x, rx90 or h (default x)");
  opt->add_flag("--symmetric", o.symmetric, "Palindromic parameters");
  opt->add_flag("--fixed-amplitude", o.fixed_amplitude, "Optimize phases only (pi pulses)");
  opt->add_option("--amplitude-bounds", o.amplitude_bounds, "lo,hi in Omega_ref units (default 0,2/tau)");
  opt->add_option("--tau", o.tau, "Pulse duration (default 1 for x, 1/2 otherwise)");
  opt->add_option("--box", o.opt_box, "Half-width of the averaging box")->capture_default_str();
  opt->add_option("--grid", o.grid, "N or NxM averaging grid")->capture_default_str();
  opt->add_option("--lr", o.lr, "Learning rate")->capture_default_str();
  opt->add_option("--clip", o.clip, "Global gradient-norm clip")->capture_default_str();
  opt->add_option("--starts", o.opt_starts, "Random starts")->capture_default_str();
  opt->add_option("--max-iters", o.max_iters, "Iteration cap per start")->capture_default_str();
  opt->add_option("--patience", o.patience, "Stall window (iterations)")->capture_default_str();
  opt->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  opt->add_option("--area-penalty", o.area_penalty, "Weight on the total area (units of pi)")->capture_default_str();
  opt->add_option("--out", o.out, "Best sequence file");
  opt->add_option("--report", o.report, "Optimization report (JSON)");

  auto* scan = app.add_subcommand("scan-duration", "Infidelity versus fractional duration error");
  add_sequence_source(scan, o);
  scan->add_option("--target", o.target, "x, rx90 or h (default: the sequence's target)");
  scan->add_option("--eta-range", o.eta_range, "lo,hi")->capture_default_str();
  scan->add_option("--samples", o.samples, "Number of eta samples")->capture_default_str();
  scan->add_option("--eps", o.eps, "Base Rabi error")->capture_default_str();
  scan->add_option("--delta", o.delta, "Base detuning")->capture_default_str();
  scan->add_option("--out", o.out, "CSV output (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    CLI::App* leaf = nullptr;
    for (CLI::App* s = &app; !s->get_subcommands().empty();) {
      s = s->get_subcommands().front();
      leaf = s;
    }
    if (!o.config.empty()) apply_config(read_config(o.config), app, leaf);
    if (o.threads < 0) throw UsageError("--threads: must be non-negative");

    if (list->parsed()) return cmd_catalog_list(o, out);
    if (show->parsed()) return cmd_catalog_show(o, out);
    if (landscape->parsed()) return cmd_landscape(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (design->parsed()) return cmd_design(o, out);
    if (opt->parsed()) return cmd_optimize(o, out);
    if (scan->parsed()) return cmd_scan_duration(o, out);
    err << "error: no command given\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace cpg::cli

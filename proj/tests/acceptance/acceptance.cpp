// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cpgates/catalog.hpp"
#include "cpgates/designer.hpp"
#include "cpgates/jet.hpp"
#include "cpgates/landscape.hpp"
#include "cpgates/optimizer.hpp"
#include "cpgates/su2.hpp"
#include "oracles.hpp"

using namespace cpg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

std::vector<oracle::P> as_oracle(const CompositeSequence& s) {
  std::vector<oracle::P> ps;
  for (const auto& p : s.pulses()) ps.push_back({p.omega(), p.tau(), p.phase()});
  return ps;
}

double circular_gap(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d < 0) d += kTwoPi;
  return std::min(d, kTwoPi - d);
}

double max_phase_gap(const CompositeSequence& a, const CompositeSequence& b) {
  const auto pa = a.phases(), pb = b.phases();
  if (pa.size() != pb.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, circular_gap(pa[i], pb[i]));
  return worst;
}

CompositeSequence random_sequence(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> om(0.3, 2.0), ta(0.3, 1.3), ph(0.0, kTwoPi);
  std::vector<Pulse> p;
  for (int i = 0; i < n; ++i) p.emplace_back(om(rng), ta(rng), ph(rng));
  return CompositeSequence("random", p);
}

// ---- criteria -------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> om(0.05, 3.0), ta(0.05, 2.0), ph(-kTwoPi, kTwoPi), er(-0.5, 0.5);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Pulse p(om(rng), ta(rng), ph(rng));
    const ErrorPoint e{er(rng), er(rng)};
    const GateMatrix lib = to_matrix(pulse_propagator(p, e));
    const oracle::M2 ref = oracle::pulse(p.omega(), p.tau(), p.phase(), e.epsilon, e.delta);
    worst = std::max(worst, (lib - ref).cwiseAbs().maxCoeff());
  }
  const double t = seconds_since(t0);
  o.detail << "max entry error " << worst << ", " << t << " s";
  o.require(worst < 1e-10, "entrywise error");
  o.require(t < 5.0, "runtime");
  return o;
}

Outcome nominal_gates() {
  Outcome o;
  double exact_worst = 0.0, table_worst = 0.0;
  int exact = 0, tables = 0;
  for (const auto& rec : Catalog::instance().records()) {
    const auto& s = rec.sequence;
    const double inf = sequence_infidelity(s, s.target(), {});
    if (rec.origin == Origin::Optimized) {
      ++tables;
      table_worst = std::max(table_worst, inf);
      o.require(inf < 1e-2, s.name());
    } else if (rec.origin != Origin::Reference && s.target() == GateKind::X) {
      ++exact;
      exact_worst = std::max(exact_worst, inf);
      o.require(inf < 1e-12, s.name());
    }
  }
  o.detail << exact << " exact X entries, worst " << exact_worst << "; " << tables << " table entries, worst "
           << table_worst;
  return o;
}

Outcome derivative_cancellation() {
  Outcome o;
  const std::vector<DerivativeOrder> first = {{1, 0}, {0, 1}, {1, 1}};
  auto plus = [](std::vector<DerivativeOrder> v, std::vector<DerivativeOrder> extra) {
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
  };
  const auto second = plus(first, {{2, 0}, {0, 2}});
  const std::vector<std::pair<std::string, std::vector<DerivativeOrder>>> claims = {
      {"X5a", first},
      {"X5b", first},
      {"U5a", first},
      {"U5b", first},
      {"X7a", plus(first, {{2, 0}})},
      {"X7b", plus(first, {{0, 2}})},
      {"X9a", second},
      {"X9b", second},
      {"X11a", plus(second, {{2, 1}})},
      {"X11b", plus(second, {{1, 2}})},
      {"X13a", plus(second, {{2, 1}, {1, 2}})},
      {"X13b", plus(second, {{2, 1}, {1, 2}})},
  };
  double jet_worst = 0.0, fd_worst = 0.0;
  for (const auto& [name, orders] : claims) {
    const auto& s = catalog_get(name).sequence;
    const UnitaryJet jet = sequence_jet(s);
    const auto ps = as_oracle(s);
    for (const auto& ord : orders) {
      const double j = derivative_matrix(jet, ord.eps, ord.delta).norm();
      const double f = oracle::richardson(ps, ord.eps, ord.delta, 1e-3).norm();
      jet_worst = std::max(jet_worst, j);
      fd_worst = std::max(fd_worst, f);
      const std::string tag = name + " D" + std::to_string(ord.eps) + std::to_string(ord.delta);
      o.require(j < 1e-9, tag + " jet");
      o.require(f < 1e-6, tag + " finite difference");
    }
  }
  o.detail << "X7a D20, X7b D02, X11a D21, X11b D12; jet max " << jet_worst << ", finite difference max "
           << fd_worst;
  return o;
}

Outcome bracket_inconsistency() {
  Outcome o;
  const auto ph = catalog_get("X5a").sequence.phases();
  const auto c = five_pulse_bracket_check(ph[0], ph[1]);
  const double sum = c.published_d10_bracket + c.published_d01_bracket;
  o.detail << "X5a |D10 U11| " << std::abs(c.jet_d10_u11) << ", |D01 U11| " << std::abs(c.jet_d01_u11)
           << "; printed brackets " << c.published_d10_bracket << " + " << c.published_d01_bracket << " = " << sum
           << "; consistent variant 1 + 2cos p1 + 2cos(2p1 - p2) = " << c.consistent_d10_bracket;
  o.require(std::abs(c.jet_d10_u11) < 1e-12 && std::abs(c.jet_d01_u11) < 1e-12, "first-order conditions");
  o.require(std::fabs(sum - 2.0) < 1e-12, "printed brackets sum");
  o.require(std::fabs(c.published_d10_bracket) > 1e-3, "printed D10 bracket should not vanish");
  o.require(std::fabs(c.consistent_d10_bracket) < 1e-12, "consistent variant");
  return o;
}

Outcome closed_form_constants() {
  Outcome o;
  const double xi = constants::seven_pulse_xi() / kPi;
  const double phi1 = (constants::nine_pulse_xi1() + kPi) / kPi;
  const double phi2 = constants::nine_pulse_xi2() / kPi;
  o.detail << "xi/pi " << xi << ", phi1/pi " << phi1 << ", phi2/pi " << phi2;
  o.require(std::fabs(xi - 0.2639) < 5e-4, "xi");
  o.require(std::fabs(phi1 - 1.4196) < 5e-4, "phi1");
  o.require(std::fabs(phi2 - 0.1294) < 5e-4, "phi2");
  return o;
}

Outcome area_fixtures() {
  Outcome o;
  const std::vector<std::pair<std::string, double>> fixtures = {
      {"X5c", 6.993}, {"X9c", 12.842}, {"H3", 1.944}, {"H15", 5.493}};
  for (const auto& [name, expected] : fixtures) {
    const double area = catalog_get(name).nominal_area;
    o.detail << name << " " << area << " ";
    o.require(std::fabs(area - expected) < 5e-3, name + " expected " + std::to_string(expected));
  }
  return o;
}

Outcome phase_shift_correspondence() {
  Outcome o;
  const auto& x5a = catalog_get("X5a").sequence;
  const auto& x5b = catalog_get("X5b").sequence;
  const auto a = shift_all_phases(catalog_get("U5a-raw").sequence, -2.0 * kPi / 3.0);
  const auto b = shift_all_phases(catalog_get("U5b-raw").sequence, 2.0 * kPi / 3.0);
  const double ga = max_phase_gap(a, x5a), gb = max_phase_gap(b, x5b);
  const double ga_mirror = max_phase_gap(a, negate_phases(x5a));
  o.detail << "U5a gap " << ga << " (to mirrored X5a " << ga_mirror << "), U5b gap " << gb;
  o.require(ga < 1e-12, "U5a shifted by -2pi/3");
  o.require(gb < 1e-12, "U5b shifted by +2pi/3");
  return o;
}

Outcome single_pulse_closed_form() {
  Outcome o;
  const auto& pi = catalog_get("pi").sequence;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double eps = -0.5 + k / 99.0;
    const double s = std::sin(eps * kPi / 2.0);
    worst = std::max(worst, std::fabs(sequence_infidelity(pi, GateKind::X, {eps, 0.0}) - 2.0 / 3.0 * s * s));
  }
  o.detail << "max deviation " << worst;
  o.require(worst < 1e-12, "closed form");
  return o;
}

Outcome landscape_trends() {
  Outcome o;
  const auto t0 = Clock::now();
  const ErrorBox box{-0.3, 0.3, -0.3, 0.3};
  const GridSize n{201, 201};
  auto grid = [&](const std::string& name) { return eval_grid(catalog_get(name).sequence, GateKind::X, box, n); };

  double prev = -1.0;
  for (const char* name : {"X5a", "X7a", "X9a", "X11a", "X13a"}) {
    const double f = robust_fraction(grid(name), 1e-4);
    o.detail << name << " " << f << " ";
    o.require(f > prev, std::string(name) + " not above its predecessor");
    prev = f;
  }
  auto inf = [](const char* name, ErrorPoint e) { return sequence_infidelity(catalog_get(name).sequence, GateKind::X, e); };
  const double pi_e = inf("pi", {0.2, 0.0}), b3r = inf("B3r", {0.2, 0.0});
  const double pi_d = inf("pi", {0.0, 0.2}), b3d = inf("B3d", {0.0, 0.2});
  o.detail << "; at eps 0.2 B3r " << b3r << " vs pi " << pi_e << "; at delta 0.2 B3d " << b3d << " vs pi " << pi_d;
  o.require(b3r < pi_e, "B3r at (0.2, 0)");
  o.require(b3d < pi_d, "B3d at (0, 0.2)");

  const double fc = robust_fraction(grid("CORPSE"), 1e-2);
  const double fp = robust_fraction(grid("pi"), 1e-2);
  o.detail << "; level 1e-2 CORPSE " << fc << " vs pi " << fp;
  o.require(std::fabs(fc - fp) <= 0.25 * fp, "CORPSE within 25% of pi");

  const double t = seconds_since(t0);
  o.detail << "; " << t << " s";
  o.require(t < 120.0, "runtime");
  return o;
}

Outcome mirror_identity() {
  Outcome o;
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> len(1, 9);
  std::uniform_real_distribution<double> er(-0.5, 0.5);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto s = random_sequence(rng, len(rng));
    const ErrorPoint e{er(rng), er(rng)};
    const double a = sequence_infidelity(negate_phases(s), GateKind::X, e);
    const double b = sequence_infidelity(s, GateKind::X, {e.epsilon, -e.delta});
    worst = std::max(worst, std::fabs(a - b));
  }
  o.detail << "max deviation " << worst;
  o.require(worst < 1e-12, "mirror");
  return o;
}

Outcome designer_recovery() {
  Outcome o;
  const auto t0 = Clock::now();
  DesignOptions opts;
  opts.starts = 256;
  const auto sols = design_symmetric(DesignProblem(5, ConditionSet({{1, 0}, {0, 1}, {1, 1}})), opts);
  const double t = seconds_since(t0);
  o.detail << sols.size() << " distinct solutions";
  for (const char* name : {"X5a", "X5b"}) {
    const auto ph = catalog_get(name).sequence.phases();
    const std::vector<double> half(ph.begin(), ph.begin() + 3);
    std::vector<double> mirror = half;
    for (auto& p : mirror) p = -p;
    double best = INFINITY;
    for (const auto& s : sols) {
      best = std::min({best, phase_distance(s.half_phases, half), phase_distance(s.half_phases, mirror)});
    }
    o.detail << ", " << name << " at " << best;
    o.require(best < 1e-6, std::string(name) + " recovered");
  }
  o.detail << ", " << t << " s";
  o.require(t < 60.0, "runtime");
  return o;
}

Outcome optimizer_parity() {
  Outcome o;
  struct Case {
    int n;
    GateKind target;
    const char* fixture;
    oracle::M2 gate;
  };
  const std::vector<Case> cases = {{5, GateKind::X, "X5c", oracle::minus_i_x()},
                                   {3, GateKind::RX90, "H3", oracle::rx90()}};
  for (const auto& c : cases) {
    const OptimizerSpec spec = OptimizerSpec::defaults(c.n, c.target);
    const double fixture = oracle::grid_average(as_oracle(catalog_get(c.fixture).sequence), c.gate,
                                                spec.box.eps_hi, spec.grid.n_eps);
    const auto t0 = Clock::now();
    const OptResult r = optimize(spec);
    const double t = seconds_since(t0);
    OptimizerSpec again = spec;
    again.threads = 2;
    const OptResult r2 = optimize(again);
    const bool same = r2.params == r.params && r2.objective == r.objective;
    o.detail << "N=" << c.n << " " << to_string(c.target) << " " << r.objective << " vs " << c.fixture << " "
             << fixture << " (" << r.objective / fixture << "x, " << t << " s" << (same ? ", repeatable" : "")
             << ") ";
    o.require(r.objective <= 1.2 * fixture, std::string(c.fixture) + " parity");
    o.require(t < 300.0, "runtime");
    o.require(same, "determinism");
  }
  return o;
}

Outcome hadamard_wrap_check() {
  Outcome o;
  const double direct = (hadamard_wrap(target_gate(GateKind::RX90)) - target_gate(GateKind::H)).cwiseAbs().maxCoeff();
  std::mt19937_64 rng(13);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const GateMatrix u = oracle::random_unitary(rng);
    worst = std::max(worst, std::fabs(gate_fidelity(hadamard_wrap(u), target_gate(GateKind::H)) -
                                      gate_fidelity(u, target_gate(GateKind::RX90))));
  }
  o.detail << "wrap(RX90) - H " << direct << ", fidelity deviation " << worst;
  o.require(direct < 1e-12, "wrap of RX90");
  o.require(worst < 1e-14, "fidelity");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"nominal gates", nominal_gates},
      {"derivative cancellation", derivative_cancellation},
      {"five-pulse bracket inconsistency", bracket_inconsistency},
      {"closed-form constants", closed_form_constants},
      {"area fixtures", area_fixtures},
      {"phase-shift correspondence", phase_shift_correspondence},
      {"single-pulse closed form", single_pulse_closed_form},
      {"landscape trends", landscape_trends},
      {"mirror identity", mirror_identity},
      {"designer recovery", designer_recovery},
      {"optimizer parity", optimizer_parity},
      {"hadamard wrap", hadamard_wrap_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << " [exception: " << e.what() << "]";
    }
    if (!r.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, r.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

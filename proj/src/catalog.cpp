#include "cpgates/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace cpg {

namespace constants {
double bb1_zeta() { return std::acos(-0.25); }
double seven_pulse_xi() { return std::acos((3.0 + std::sqrt(61.0)) / 16.0); }
double nine_pulse_xi1() { return std::atan(std::sqrt(15.0)); }
double nine_pulse_xi2() { return std::atan(std::sqrt(15.0) / 9.0); }
}  // namespace constants

namespace {

using Orders = std::vector<DerivativeOrder>;

const Orders kFirstOrder = {{1, 0}, {0, 1}, {1, 1}};
const Orders kSecondOrder = {{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}};

Orders with(Orders base, std::initializer_list<DerivativeOrder> extra) {
  base.insert(base.end(), extra);
  std::sort(base.begin(), base.end());
  return base;
}

std::vector<double> times_pi(std::initializer_list<double> v) {
  std::vector<double> out;
  for (double x : v) out.push_back(x * kPi);
  return out;
}

SequenceRecord anagram(std::string name, std::vector<double> half, std::string source, Origin origin,
                       Orders claimed) {
  SequenceRecord rec{anagram_sequence(std::move(name), half), std::move(source), origin, std::move(claimed)};
  rec.nominal_area = rec.sequence.total_area();
  return rec;
}

SequenceRecord pi_train(std::string name, std::vector<double> phases, std::string source, Orders claimed) {
  std::vector<Pulse> pulses;
  for (double p : phases) pulses.emplace_back(1.0, 1.0, p);
  SequenceRecord rec{CompositeSequence(std::move(name), std::move(pulses), GateKind::X, false),
                     std::move(source), Origin::Analytic, std::move(claimed)};
  rec.nominal_area = rec.sequence.total_area();
  return rec;
}

// Optimized table row. Amplitudes are tabulated in units of 1/T with T the
// pulse duration, so omega = printed / tau in Omega_ref units and each pulse
// rotates by printed * pi. For the T = 1/2 table the printed area is half of
// sum(omega * tau); nominal_area keeps the rotation sum.
SequenceRecord table_row(std::string name, GateKind target, double tau, std::vector<double> amplitudes,
                         std::vector<double> phases_over_pi, double printed_area, std::string source) {
  std::vector<Pulse> pulses;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    pulses.emplace_back(amplitudes[i] / tau, tau, phases_over_pi[i] * kPi);
  }
  SequenceRecord rec{CompositeSequence(std::move(name), std::move(pulses), target, false), std::move(source),
                     Origin::Optimized, {}};
  rec.nominal_area = rec.sequence.total_area();
  rec.printed_area = printed_area;
  rec.printed_phases_over_pi = std::move(phases_over_pi);
  rec.printed_amplitudes = std::move(amplitudes);
  return rec;
}

std::vector<SequenceRecord> build_records() {
  std::vector<SequenceRecord> r;
  const double xi = constants::seven_pulse_xi();
  const double xi1 = constants::nine_pulse_xi1();
  const double xi2 = constants::nine_pulse_xi2();
  const double zeta = constants::bb1_zeta();

  r.push_back(pi_train("pi", {0.0}, "single resonant pi pulse", {}));
  {
    std::vector<Pulse> p{{7.0 / 3.0, 1.0, 0.0}, {5.0 / 3.0, 1.0, kPi}, {1.0 / 3.0, 1.0, 0.0}};
    SequenceRecord rec{CompositeSequence("CORPSE", std::move(p), GateKind::X, false),
                       "CORPSE three-pulse benchmark (7pi/3)_0 (5pi/3)_pi (pi/3)_0", Origin::Analytic, {}};
    rec.nominal_area = rec.sequence.total_area();
    r.push_back(std::move(rec));
  }
  r.push_back(anagram("B3r", times_pi({1.0 / 3.0, 5.0 / 3.0}),
                      "three-pulse benchmark robust to Rabi errors (SCROFULOUS)", Origin::Analytic, {}));
  r.push_back(anagram("B3d", times_pi({2.0 / 3.0, 1.0 / 3.0}), "three-pulse benchmark robust to detuning",
                      Origin::Analytic, {}));

  r.push_back(anagram("X5a", times_pi({2.0 / 3.0, -1.0 / 6.0, 1.0 / 3.0}),
                      "five-pulse anagram, closed-form first-order solution a", Origin::Analytic, kFirstOrder));
  r.push_back(anagram("X5b", times_pi({2.0 / 3.0, 5.0 / 6.0, 1.0 / 3.0}),
                      "five-pulse anagram, closed-form first-order solution b", Origin::Analytic, kFirstOrder));

  {
    auto a = anagram("U5a-raw", times_pi({0.0, 5.0 / 6.0, 1.0 / 3.0}),
                     "universal five-pulse sequence a as published (unshifted)", Origin::Reference, kFirstOrder);
    a.notes = "nominal propagator is not -iX; shift all phases by -2pi/3 to obtain U5a";
    auto b = anagram("U5b-raw", times_pi({0.0, 1.0 / 6.0, 5.0 / 3.0}),
                     "universal five-pulse sequence b as published (unshifted)", Origin::Reference, kFirstOrder);
    b.notes = "nominal propagator is not -iX; shift all phases by +2pi/3 to obtain U5b";
    SequenceRecord ua = a;
    ua.sequence = CompositeSequence("U5a", shift_all_phases(a.sequence, -2.0 * kPi / 3.0).pulses(), GateKind::X, true);
    ua.source = "universal five-pulse sequence a, all phases shifted by -2pi/3";
    ua.origin = Origin::Analytic;
    ua.notes = "equals the mirror (negated phases) of X5a";
    SequenceRecord ub = b;
    ub.sequence = CompositeSequence("U5b", shift_all_phases(b.sequence, 2.0 * kPi / 3.0).pulses(), GateKind::X, true);
    ub.source = "universal five-pulse sequence b, all phases shifted by +2pi/3";
    ub.origin = Origin::Analytic;
    ub.notes = "equals X5b";
    r.push_back(std::move(a));
    r.push_back(std::move(b));
    r.push_back(std::move(ua));
    r.push_back(std::move(ub));
  }

  r.push_back(pi_train("BB1", {0.0, zeta, 3.0 * zeta, 3.0 * zeta, zeta},
                       "Wimperis BB1 with zeta = arccos(-1/4)", {{1, 0}}));
  {
    // phi2 in closed form; phi1 is the root of D10 = 0 nearest -0.432839 pi
    // under phi3 = 2 phi2 - 2 phi1.
    const double phi2 = std::asin((3.0 * std::sqrt(10.0) - 2.0) / 8.0) - 0.5 * kPi;
    const double phi1 = -0.4328389713058471 * kPi;
    auto rec = anagram("G5", {phi1, phi2, 2.0 * phi2 - 2.0 * phi1},
                       "symmetric five-pulse sequence compensating Rabi errors",
                       Origin::Analytic, {});
    rec.printed_phases_over_pi = {-0.432839, -0.11463, 0.636418};
    rec.notes = "printed arcsin form of phi1 disagrees with its decimal value; decimal value used";
    r.push_back(std::move(rec));
  }
  r.push_back(pi_train("B5", times_pi({0.8, 0.0, 0.4, 0.0, 0.8}),
                       "B5 five-pulse sequence, phase-shifted by -4pi/5 to produce -iX", {{1, 0}}));

  r.push_back(anagram("U7a", times_pi({5.0 / 12.0, 0.5, 19.0 / 12.0, 0.0}),
                      "universal seven-pulse sequence a, phase-shifted", Origin::Analytic, {}));
  r.push_back(anagram("U7b", times_pi({7.0 / 12.0, 1.5, 17.0 / 12.0, 0.0}),
                      "universal seven-pulse sequence b, phase-shifted", Origin::Analytic, {}));
  {
    auto a = anagram("X7a", {kPi - xi, 7.0 / 3.0 * kPi - 2.0 * xi, 8.0 / 3.0 * kPi - 3.0 * xi, 5.0 / 3.0 * kPi - 4.0 * xi},
                     "seven-pulse anagram, closed form with xi = arccos((3+sqrt61)/16), D20 condition set",
                     Origin::Analytic, with(kFirstOrder, {{2, 0}}));
    a.printed_phases_over_pi = {0.7361, 1.8056, 1.8751, 0.6112};
    auto b = anagram("X7b", {2.0 * kPi - xi, 7.0 / 3.0 * kPi - 2.0 * xi, 5.0 / 3.0 * kPi - 3.0 * xi, 5.0 / 3.0 * kPi - 4.0 * xi},
                     "seven-pulse anagram, closed form with xi = arccos((3+sqrt61)/16), D02 condition set",
                     Origin::Analytic, with(kFirstOrder, {{0, 2}}));
    b.printed_phases_over_pi = {1.7361, 1.8056, 0.8751, 0.6112};
    b.notes = "phi3 = 5pi/3 - 3xi, matching the printed decimal 0.8751 pi";
    r.push_back(std::move(a));
    r.push_back(std::move(b));
  }

  r.push_back(anagram("U9a", times_pi({4.0 / 3.0, 35.0 / 24.0, 3.0 / 4.0, 35.0 / 24.0, 5.0 / 3.0}),
                      "universal nine-pulse sequence a, phase-shifted", Origin::Analytic, {}));
  r.push_back(anagram("U9b", times_pi({2.0 / 3.0, 37.0 / 24.0, 5.0 / 4.0, 37.0 / 24.0, 1.0 / 3.0}),
                      "universal nine-pulse sequence b, phase-shifted", Origin::Analytic, {}));
  {
    auto a = anagram("X9a", {xi1 + kPi, xi2, 2.0 * xi1, 5.0 * xi1 - xi2, 4.0 * xi1},
                     "nine-pulse anagram, closed form with xi1 = arctan(sqrt15), xi2 = arctan(sqrt15/9)",
                     Origin::Analytic, kSecondOrder);
    a.printed_phases_over_pi = {1.4196, 0.1294, 0.8391, 1.9685, 1.6783};
    auto b = anagram("X9b", {xi1 + kPi, xi2 + kPi, 2.0 * xi1, 5.0 * xi1 - xi2 - kPi, 4.0 * xi1},
                     "nine-pulse anagram, closed form with xi1 = arctan(sqrt15), xi2 = arctan(sqrt15/9)",
                     Origin::Analytic, kSecondOrder);
    b.printed_phases_over_pi = {1.4196, 1.1294, 0.8391, 0.9685, 1.6783};
    r.push_back(std::move(a));
    r.push_back(std::move(b));
  }

  r.push_back(anagram("U11a", times_pi({5.0 / 12.0, 4.0 / 3.0, 5.0 / 4.0, 1.0 / 3.0, 0.5, 0.0}),
                      "universal eleven-pulse sequence a, phase-shifted", Origin::Analytic, {}));
  r.push_back(anagram("U11b", times_pi({5.0 / 12.0, 1.0 / 3.0, 5.0 / 4.0, 4.0 / 3.0, 0.5, 1.0}),
                      "universal eleven-pulse sequence b, phase-shifted", Origin::Analytic, {}));
  {
    auto a = anagram("X11a",
                     times_pi({0.55328796392376778, 0.80089057627555937, 0.70912457807479712, 1.4463785953937298,
                               0.68092896021786042, 0.39214466109427221}),
                     "eleven-pulse anagram, D21 condition set", Origin::Polished, with(kSecondOrder, {{2, 1}}));
    a.printed_phases_over_pi = {0.5533, 0.8009, 0.7091, 1.4464, 0.6809, 0.3921};
    auto b = anagram("X11b",
                     times_pi({1.5532879639237678, 0.80089057627555937, 1.7091245780747972, 1.44637859539373,
                               1.6809289602178608, 0.39214466109427237}),
                     "eleven-pulse anagram, D12 condition set", Origin::Polished, with(kSecondOrder, {{1, 2}}));
    b.printed_phases_over_pi = {1.5533, 0.8009, 1.7091, 1.4464, 1.6809, 0.3921};
    r.push_back(std::move(a));
    r.push_back(std::move(b));
  }

  r.push_back(anagram("U13a",
                      times_pi({0.5, 7.0 / 8.0, 9.0 / 4.0, 23.0 / 24.0, 5.0 / 6.0, 49.0 / 24.0, 7.0 / 12.0}),
                      "universal thirteen-pulse sequence a, phase-shifted", Origin::Analytic, {}));
  r.push_back(anagram("U13b",
                      times_pi({0.5, 15.0 / 8.0, 9.0 / 4.0, 47.0 / 24.0, 5.0 / 6.0, 25.0 / 24.0, 7.0 / 12.0}),
                      "universal thirteen-pulse sequence b, phase-shifted", Origin::Analytic, {}));
  {
    auto a = anagram("X13a",
                     times_pi({0.53248143698907391, 0.50725585157840503, 1.2915333608550967, 0.44430682800404137,
                               0.73019529268874239, 0.48082916221213323, 1.7563635025233408}),
                     "thirteen-pulse anagram, D12 and D21 conditions", Origin::Polished,
                     with(kSecondOrder, {{1, 2}, {2, 1}}));
    a.printed_phases_over_pi = {0.5325, 0.5073, 1.2915, 0.4443, 0.7302, 0.4808, 1.7564};
    auto b = anagram("X13b",
                     times_pi({0.53248143698906514, 1.5072558515783956, 1.2915333608550879, 1.4443068280040314,
                               0.73019529268873229, 1.4808291622121235, 1.7563635025233308}),
                     "thirteen-pulse anagram, D12 and D21 conditions", Origin::Polished,
                     with(kSecondOrder, {{1, 2}, {2, 1}}));
    b.printed_phases_over_pi = {0.5325, 1.5073, 1.2915, 1.4443, 0.7302, 1.4808, 1.7564};
    r.push_back(std::move(a));
    r.push_back(std::move(b));
  }

  const std::string xsrc = "asymmetric X table, optimized on an 8x8 grid over [-0.15, 0.15]^2";
  r.push_back(table_row("X5c", GateKind::X, 1.0, {0.9974, 2.0, 0.9985, 2.0, 0.9974},
                        {0.6605, 0.9741, 0.3164, 0.9741, 0.6605}, 6.993, xsrc));
  r.push_back(table_row("X7c", GateKind::X, 1.0, {0.9947, 0.8532, 1.1369, 0.9909, 1.1412, 0.853, 0.9884},
                        {0.3645, 0.1215, 0.1182, 0.7512, 0.1301, 0.1446, 0.4025}, 6.958, xsrc));
  r.push_back(table_row("X9c", GateKind::X, 1.0,
                        {0.9808, 1.9845, 0.9821, 1.987, 0.986, 1.978, 0.9822, 2.0, 0.9617},
                        {1.7068, 1.2315, 1.8541, 1.1962, 0.6935, 1.1553, 0.4903, 1.1095, 0.9444}, 12.842, xsrc));
  r.push_back(table_row("X11c", GateKind::X, 1.0,
                        {0.9328, 0.978, 1.0012, 1.0091, 0.876, 1.1016, 0.9973, 1.0054, 1.0225, 0.9976, 0.9274},
                        {0.0933, 1.0372, 1.8939, 1.0681, 0.6867, 0.6947, 1.1986, 0.1885, 1.6011, 1.2569, 0.7698},
                        10.849, xsrc));

  const std::string hsrc = "variable-amplitude Rx(pi/2) table (Hadamard up to virtual Z), T = 1/2 per pulse";
  r.push_back(table_row("H3", GateKind::RX90, 0.5, {0.986, 1.1996, 1.7027}, {0.0, 0.0, 1.0}, 1.944, hsrc));
  r.push_back(table_row("H4", GateKind::RX90, 0.5, {1.4800, 0.9629, 1.0565, 0.7785},
                        {0.1691, 0.7314, 0.2464, 0.6099}, 2.139, hsrc));
  r.push_back(table_row("H5", GateKind::RX90, 0.5, {1.2821, 1.9916, 0.9944, 1.9924, 1.286},
                        {1.2276, 0.1928, 1.3804, 0.1911, 1.2256}, 3.773, hsrc));
  r.push_back(table_row("H6", GateKind::RX90, 0.5, {0.5102, 0.8294, 0.9270, 1.9335, 0.9121, 0.3089},
                        {1.309, 1.0795, 0.4598, 1.2186, 0.4975, 1.3794}, 2.710, hsrc));
  {
    auto h7 = table_row("H7", GateKind::RX90, 0.5, {1.3064, 1.0895, 1.0043, 0.999, 2.0, 0.9574, 0.7351},
                        {0.2205, 0.2867, 0.8073, 1.8094, 1.2824, 1.7885, 0.6264}, 4.046, hsrc);
    h7.notes = "source-ambiguous: malformed bracket in the printed phase row; values taken in printed order";
    r.push_back(std::move(h7));
  }
  r.push_back(table_row("H8", GateKind::RX90, 0.5,
                        {1.3315, 0.7078, 1.6136, 0.9083, 1.3398, 0.9064, 1.7474, 1.1608},
                        {0.8179, 0.6373, 0.0913, 0.768, 0.1225, 0.2334, 0.9024, 0.1902}, 4.858, hsrc));
  r.push_back(table_row("H10", GateKind::RX90, 0.5,
                        {0.0035, 1.5479, 0.9249, 1.409, 0.3187, 0.3829, 1.4208, 0.9399, 1.124, 0.9641},
                        {0.2848, 1.0292, 1.6984, 0.9726, 1.036, 0.1623, 1.9968, 0.6467, 1.9738, 1.9592}, 4.518,
                        hsrc));
  r.push_back(table_row("H15", GateKind::RX90, 0.5,
                        {0.1612, 0.9629, 0.9401, 0.7359, 0.779, 0.7857, 0.8733, 0.6415, 1.1298, 0.8665, 0.5438,
                         0.9953, 0.5926, 0.7286, 0.2502},
                        {0.7747, 0.6769, 1.7227, 0.0297, 0.0113, 1.2504, 1.8338, 0.0691, 1.71, 0.726, 0.9383,
                         1.0377, 0.2238, 0.633, 0.9892},
                        5.493, hsrc));

  std::sort(r.begin(), r.end(),
            [](const SequenceRecord& a, const SequenceRecord& b) { return a.sequence.name() < b.sequence.name(); });
  return r;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const bool same = std::tolower(static_cast<unsigned char>(a[i - 1])) ==
                        std::tolower(static_cast<unsigned char>(b[j - 1]));
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (same ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

Catalog::Catalog() : records_(build_records()) {}

const Catalog& Catalog::instance() {
  static const Catalog catalog;
  return catalog;
}

bool Catalog::contains(std::string_view name) const {
  return std::any_of(records_.begin(), records_.end(),
                     [&](const SequenceRecord& r) { return r.sequence.name() == name; });
}

const SequenceRecord& Catalog::get(std::string_view name) const {
  for (const auto& r : records_) {
    if (r.sequence.name() == name) return r;
  }
  std::vector<std::pair<std::size_t, std::string>> near;
  for (const auto& r : records_) near.emplace_back(edit_distance(name, r.sequence.name()), r.sequence.name());
  std::sort(near.begin(), near.end());
  std::ostringstream msg;
  msg << "unknown sequence '" << name << "'; did you mean";
  for (std::size_t i = 0; i < std::min<std::size_t>(3, near.size()); ++i) {
    msg << (i ? ", " : " ") << near[i].second;
  }
  msg << "?";
  throw NotFoundError(msg.str());
}

std::vector<std::string> Catalog::list(std::optional<GateKind> target) const {
  std::vector<std::string> names;
  for (const auto& r : records_) {
    if (!target || r.sequence.target() == *target) names.push_back(r.sequence.name());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<CheckRow> closed_form_check() {
  std::vector<CheckRow> rows;
  auto phase_row = [&](std::string label, double computed_over_pi, double printed, double tol) {
    double d = std::fmod(computed_over_pi - printed, 2.0);
    if (d < 0) d += 2.0;
    d = std::min(d, 2.0 - d);
    rows.push_back({std::move(label), computed_over_pi, printed, tol, d <= tol});
  };
  auto plain_row = [&](std::string label, double computed, double printed, double tol) {
    rows.push_back({std::move(label), computed, printed, tol, std::fabs(computed - printed) <= tol});
  };
  const double tol = 5e-4;
  plain_row("xi/pi (seven-pulse)", constants::seven_pulse_xi() / kPi, 0.2639, tol);

  const Catalog& cat = Catalog::instance();
  for (const char* name : {"X7a", "X7b", "X9a", "X9b", "G5"}) {
    const auto& rec = cat.get(name);
    const auto phases = rec.sequence.phases();
    for (std::size_t i = 0; i < rec.printed_phases_over_pi.size(); ++i) {
      phase_row(std::string(name) + " phi" + std::to_string(i + 1) + "/pi", phases[i] / kPi,
                rec.printed_phases_over_pi[i], tol);
    }
  }
  for (const char* name : {"X5a", "X5b"}) {
    const auto p = cat.get(name).sequence.phases();
    phase_row(std::string(name) + " phi3 vs 2phi2-2phi1", (2.0 * p[1] - 2.0 * p[0]) / kPi, p[2] / kPi, 1e-12);
  }
  for (const auto& rec : cat.records()) {
    if (rec.printed_area) {
      plain_row(rec.sequence.name() + " area/pi", rec.nominal_area, *rec.printed_area, 5e-3);
    }
  }
  return rows;
}

}  // namespace cpg

#include <doctest.h>

#include <set>

#include "cpgates/catalog.hpp"
#include "cpgates/designer.hpp"

using namespace cpg;

namespace {

bool same_phase(double a, double b, double tol) { return std::fabs(std::remainder(a - b, kTwoPi)) < tol; }

const std::vector<std::string> kExactX = {"B3d", "B3r", "B5", "BB1", "CORPSE", "G5", "U11a", "U11b", "U13a",
                                          "U13b", "U5a", "U5b", "U7a", "U7b", "U9a", "U9b", "X11a", "X11b",
                                          "X13a", "X13b", "X5a", "X5b", "X7a", "X7b", "X9a", "X9b", "pi"};
const std::vector<std::string> kTables = {"X5c", "X7c", "X9c", "X11c", "H3", "H4",
                                          "H5", "H6", "H7", "H8", "H10", "H15"};

}  // namespace

TEST_CASE("get: X5a") {
  const auto& rec = catalog_get("X5a");
  const auto ph = rec.sequence.phases();
  const double half[] = {2.0 / 3.0, -1.0 / 6.0, 1.0 / 3.0, -1.0 / 6.0, 2.0 / 3.0};
  REQUIRE(ph.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(same_phase(ph[i], half[i] * kPi, 1e-15));
    CHECK(rec.sequence.pulses()[i].omega() == 1.0);
    CHECK(rec.sequence.pulses()[i].tau() == 1.0);
  }
  CHECK(rec.sequence.symmetric());
}

TEST_CASE("get: BB1") {
  const double z = std::acos(-0.25);
  const auto ph = catalog_get("BB1").sequence.phases();
  const double expect[] = {0.0, z, 3 * z, 3 * z, z};
  for (int i = 0; i < 5; ++i) CHECK(same_phase(ph[i], expect[i], 1e-15));
}

TEST_CASE("get: H3") {
  const auto& rec = catalog_get("H3");
  const auto& p = rec.sequence.pulses();
  REQUIRE(p.size() == 3);
  const double printed[] = {0.986, 1.1996, 1.7027};
  for (int i = 0; i < 3; ++i) {
    CHECK(p[i].tau() == 0.5);
    // each pulse rotates by the tabulated amplitude times pi
    CHECK(p[i].area() == doctest::Approx(printed[i]).epsilon(1e-15));
  }
  CHECK(same_phase(p[0].phase(), 0.0, 1e-15));
  CHECK(same_phase(p[2].phase(), kPi, 1e-15));
  // rotation sum; the tabulated 1.944 is half of it
  CHECK(rec.nominal_area == doctest::Approx(0.986 + 1.1996 + 1.7027).epsilon(1e-14));
  CHECK(rec.sequence.target() == GateKind::RX90);
}

TEST_CASE("get: unknown name lists near matches") {
  try {
    catalog_get("X5d");
    FAIL("expected NotFoundError");
  } catch (const NotFoundError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("X5a") != std::string::npos);
  }
  CHECK_FALSE(Catalog::instance().contains("nope"));
  CHECK(Catalog::instance().contains("U13b"));
}

TEST_CASE("list") {
  const auto x = Catalog::instance().list(GateKind::X);
  for (const char* n : {"X5a", "U13b", "CORPSE"}) CHECK(std::find(x.begin(), x.end(), n) != x.end());
  CHECK(std::is_sorted(x.begin(), x.end()));
  const auto h = Catalog::instance().list(GateKind::RX90);
  for (const char* n : {"H3", "H4", "H5", "H6", "H7", "H8", "H10", "H15"})
    CHECK(std::find(h.begin(), h.end(), n) != h.end());
  const auto all = Catalog::instance().list();
  CHECK(all.size() == Catalog::instance().records().size());
  CHECK(all.size() == x.size() + h.size());
  CHECK(std::set<std::string>(all.begin(), all.end()).size() == all.size());
}

TEST_CASE("roster is complete") {
  for (const auto& n : kExactX) CHECK_MESSAGE(Catalog::instance().contains(n), n);
  for (const auto& n : kTables) CHECK_MESSAGE(Catalog::instance().contains(n), n);
  CHECK(catalog_get("H7").notes.find("source-ambiguous") != std::string::npos);
}

TEST_CASE("property: nominal gates") {
  for (const auto& n : kExactX) {
    const auto& s = catalog_get(n).sequence;
    CHECK_MESSAGE(sequence_infidelity(s, GateKind::X, {}) < 1e-12, n);
  }
  for (const auto& n : kTables) {
    const auto& s = catalog_get(n).sequence;
    CHECK_MESSAGE(sequence_infidelity(s, s.target(), {}) < 1e-2, n);
    CHECK_MESSAGE(sequence_infidelity(s, s.target(), {}) > 0.0, n);
  }
  // H records also implement H after the virtual-Z wrap
  for (const char* n : {"H3", "H15"}) {
    const auto& s = catalog_get(n).sequence;
    CHECK(sequence_infidelity(s, GateKind::H, {}) ==
          doctest::Approx(sequence_infidelity(s, GateKind::RX90, {})).epsilon(1e-12));
  }
}

TEST_CASE("property: claimed orders vanish") {
  for (const auto& rec : Catalog::instance().records()) {
    if (rec.origin == Origin::Optimized) CHECK(rec.claimed_orders.empty());
    for (const auto& o : rec.claimed_orders) {
      CHECK(o.total() >= 1);
      if (rec.origin == Origin::Reference) continue;
      CHECK_MESSAGE(sequence_derivative(rec.sequence, o.eps, o.delta).norm() < 1e-9, rec.sequence.name(), " D",
                    o.eps, ",", o.delta);
    }
  }
}

TEST_CASE("property: areas match the tables") {
  for (const auto& rec : Catalog::instance().records()) {
    CHECK(rec.nominal_area == doctest::Approx(rec.sequence.total_area()).epsilon(1e-15));
    if (!rec.printed_area) continue;
    if (rec.sequence.target() == GateKind::X) {
      CHECK_MESSAGE(std::fabs(rec.nominal_area - *rec.printed_area) <= 5e-3, rec.sequence.name());
    } else {
      // Rx(pi/2) rows tabulate half the rotation sum (see closed_form_check)
      CHECK_MESSAGE(std::fabs(rec.nominal_area - 2.0 * *rec.printed_area) <= 1e-2, rec.sequence.name());
    }
  }
}

TEST_CASE("property: loading is idempotent") {
  const auto& a = Catalog::instance();
  const auto& b = Catalog::instance();
  CHECK(&a == &b);
  const auto first = catalog_get("X9a").sequence;
  const auto again = catalog_get("X9a").sequence;
  CHECK(first == again);
}

TEST_CASE("closed-form constants") {
  CHECK(constants::seven_pulse_xi() / kPi == doctest::Approx(0.2639).epsilon(5e-4 / 0.2639));
  CHECK(constants::bb1_zeta() == doctest::Approx(std::acos(-0.25)));
  const auto rows = closed_form_check();
  CHECK(rows.size() > 10);
  for (const auto& r : rows) {
    const bool h_area = r.label[0] == 'H' && r.label.find("area") != std::string::npos;
    if (h_area) {
      // literal comparison stays red for the Rx(pi/2) table; the rows hold a factor of two
      CHECK_FALSE(r.pass);
      CHECK_MESSAGE(std::fabs(r.computed - 2.0 * r.expected) <= 1e-2, r.label);
    } else {
      CHECK_MESSAGE(r.pass, r.label, " computed ", r.computed, " expected ", r.expected);
    }
  }

  const auto x9a = catalog_get("X9a").sequence.phases();
  CHECK(x9a[0] / kPi == doctest::Approx(1.4196).epsilon(5e-4 / 1.4196));
  CHECK(x9a[1] / kPi == doctest::Approx(0.1294).epsilon(5e-4 / 0.1294));
  const auto x5a = catalog_get("X5a").sequence.phases();
  CHECK(same_phase(2 * x5a[1] - 2 * x5a[0], x5a[2], 1e-12));
}

TEST_CASE("polished records sit on exact roots near their printed phases") {
  const std::vector<DerivativeOrder> second = {{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}};
  for (const char* n : {"X11a", "X11b", "X13a", "X13b"}) {
    const auto& rec = catalog_get(n);
    CHECK(rec.origin == Origin::Polished);
    const auto ph = rec.sequence.phases();
    for (std::size_t i = 0; i < rec.printed_phases_over_pi.size(); ++i) {
      CHECK_MESSAGE(same_phase(ph[i], rec.printed_phases_over_pi[i] * kPi, 6e-5 * kPi), n, " phase ", i);
    }
    // re-derive the root from the printed decimals and compare
    DesignProblem prob(static_cast<int>(ph.size()), ConditionSet(rec.claimed_orders));
    std::vector<double> start;
    for (double p : rec.printed_phases_over_pi) start.push_back(p * kPi);
    const auto res = refine_solution(start, prob);
    CHECK(res.residual_inf < 1e-12);
    for (std::size_t i = 0; i < start.size(); ++i) CHECK(same_phase(res.x(static_cast<Eigen::Index>(i)), ph[i], 1e-9));
  }
}

TEST_CASE("X7 and X11 condition-set assignment") {
  CHECK(sequence_derivative(catalog_get("X7a").sequence, 2, 0).norm() < 1e-9);
  CHECK(sequence_derivative(catalog_get("X7a").sequence, 0, 2).norm() > 1e-3);
  CHECK(sequence_derivative(catalog_get("X7b").sequence, 0, 2).norm() < 1e-9);
  CHECK(sequence_derivative(catalog_get("X7b").sequence, 2, 0).norm() > 1e-3);
  CHECK(sequence_derivative(catalog_get("X11a").sequence, 2, 1).norm() < 1e-9);
  CHECK(sequence_derivative(catalog_get("X11a").sequence, 1, 2).norm() > 1e-3);
  CHECK(sequence_derivative(catalog_get("X11b").sequence, 1, 2).norm() < 1e-9);
  CHECK(sequence_derivative(catalog_get("X11b").sequence, 2, 1).norm() > 1e-3);
}

TEST_CASE("U-family records are phase-shifted five-pulse solutions") {
  CHECK(sequence_infidelity(catalog_get("U5a-raw").sequence, GateKind::X, {}) > 1e-3);
  CHECK(sequence_infidelity(catalog_get("U5b-raw").sequence, GateKind::X, {}) > 1e-3);
  const auto ua = catalog_get("U5a").sequence.phases();
  const auto x5a = catalog_get("X5a").sequence.phases();
  for (std::size_t i = 0; i < 5; ++i) CHECK(same_phase(ua[i], -x5a[i], 1e-12));
}

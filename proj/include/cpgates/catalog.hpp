#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cpgates/jet.hpp"
#include "cpgates/su2.hpp"

namespace cpg {

class NotFoundError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// How a record's parameters were obtained.
enum class Origin {
  Analytic,   // exact closed-form or rational phases
  Polished,   // exact root nearest to phases printed with four decimals
  Optimized,  // numerical table entry, not an exact gate at the origin
  Reference,  // printed as-is but not a -iX implementation (unshifted universal pulses)
};

struct SequenceRecord {
  CompositeSequence sequence;
  std::string source;
  Origin origin = Origin::Analytic;
  std::vector<DerivativeOrder> claimed_orders;
  /// sum(omega * tau), units of pi.
  double nominal_area = 0.0;
  std::optional<double> printed_area;
  /// Phases (units of pi) and amplitudes exactly as tabulated, when they
  /// differ from the stored full-precision values.
  std::vector<double> printed_phases_over_pi;
  std::vector<double> printed_amplitudes;
  std::string notes;
};

/// Immutable registry of every named sequence.
class Catalog {
 public:
  static const Catalog& instance();

  const SequenceRecord& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  /// Lexicographically sorted names, optionally restricted to one target.
  std::vector<std::string> list(std::optional<GateKind> target = std::nullopt) const;

  const std::vector<SequenceRecord>& records() const { return records_; }

 private:
  Catalog();
  std::vector<SequenceRecord> records_;
};

inline const SequenceRecord& catalog_get(std::string_view name) { return Catalog::instance().get(name); }

/// Closed-form constants used by the catalog.
namespace constants {
double bb1_zeta();        // arccos(-1/4)
double seven_pulse_xi();  // arccos((3 + sqrt 61) / 16)
double nine_pulse_xi1();  // arctan(sqrt 15)
double nine_pulse_xi2();  // arctan(sqrt 15 / 9)
}  // namespace constants

struct CheckRow {
  std::string label;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Recomputes closed-form phases and areas and compares them to the printed
/// approximations. Phase rows compare modulo 2 (units of pi).
std::vector<CheckRow> closed_form_check();

}  // namespace cpg

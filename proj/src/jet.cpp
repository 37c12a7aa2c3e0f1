#include "cpgates/jet.hpp"

namespace cpg {

namespace {
constexpr Complex kI{0.0, 1.0};
}

UnitaryJet propagator_jet(const Pulse& pulse, int order) {
  const ComplexJet eps = ComplexJet::epsilon(order);
  const ComplexJet del = ComplexJet::delta(order);
  const ComplexJet y = del * Complex(kPi);
  const Complex phase = std::polar(1.0, pulse.phase());
  const Complex half_tau(0.5 * pulse.tau());

  if (pulse.omega() == 0.0) {
    // No drive: pure detuning phase, analytic in delta even though |y| is not.
    return {exp(y * (kI * half_tau)), ComplexJet(order)};
  }

  const ComplexJet x = (eps + Complex(1.0)) * Complex(pulse.omega() * kPi);
  const ComplexJet r = sqrt(x * x + y * y);
  const ComplexJet h = r * half_tau;
  const ComplexJet s = sin(h) / r;
  ComplexJet a = cos(h) + y * s * kI;
  ComplexJet b = x * s * (-kI * phase);
  return {std::move(a), std::move(b)};
}

UnitaryJet sequence_jet(std::span<const Pulse> pulses, int order) {
  UnitaryJet total{ComplexJet::constant(1.0, order), ComplexJet(order)};
  for (const auto& p : pulses) total = propagator_jet(p, order) * total;
  return total;
}

UnitaryJet sequence_jet(const CompositeSequence& seq, int order) {
  return sequence_jet(std::span<const Pulse>(seq.pulses()), order);
}

GateMatrix derivative_matrix(const UnitaryJet& jet, int m, int n) {
  const Complex da = jet.a.derivative(m, n);
  const Complex db = jet.b.derivative(m, n);
  GateMatrix d;
  d << da, db, -std::conj(db), std::conj(da);
  return d;
}

GateMatrix sequence_derivative(const CompositeSequence& seq, int m, int n, int order) {
  if (m < 0 || n < 0 || m + n > order) {
    throw std::invalid_argument("derivative order exceeds jet order");
  }
  return derivative_matrix(sequence_jet(seq, order), m, n);
}

}  // namespace cpg

#include "cpgates/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace cpg {

using nlohmann::json;

namespace {

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string origin_name(Origin o) {
  switch (o) {
    case Origin::Analytic: return "analytic";
    case Origin::Polished: return "polished";
    case Origin::Optimized: return "optimized";
    case Origin::Reference: return "reference";
  }
  return "?";
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("field '") + key + "' has the wrong type");
  }
}

// Not every phase is q * pi for a double q, so files also carry the radians.
// They are used only while they agree with phase_over_pi, which stays the
// authoritative (hand-editable) field.
double read_phase(const json& p) {
  const double from_pi = field<double>(p, "phase_over_pi") * kPi;
  if (!p.contains("phase_rad")) return from_pi;
  const double rad = field<double>(p, "phase_rad");
  return std::fabs(rad - from_pi) <= 1e-12 * std::max(1.0, std::fabs(from_pi)) ? rad : from_pi;
}

}  // namespace

SequenceFile to_sequence_file(const SequenceRecord& rec) {
  std::string prov = rec.source + " [" + origin_name(rec.origin) + "]";
  if (!rec.notes.empty()) prov += "; " + rec.notes;
  return {kSequenceSchemaVersion, rec.sequence, prov, rec.claimed_orders};
}

double phase_over_pi(double phase) {
  const double q = phase / kPi;
  if (q * kPi == phase) return q;
  double up = q;
  double down = q;
  for (int i = 0; i < 16; ++i) {
    up = std::nextafter(up, HUGE_VAL);
    down = std::nextafter(down, -HUGE_VAL);
    if (up * kPi == phase) return up;
    if (down * kPi == phase) return down;
  }
  return q;
}

std::string sequence_to_json(const SequenceFile& file) {
  json pulses = json::array();
  for (const auto& p : file.sequence.pulses()) {
    pulses.push_back({{"omega", p.omega()},
                      {"tau", p.tau()},
                      {"phase_over_pi", phase_over_pi(p.phase())},
                      {"phase_rad", p.phase()}});
  }
  json orders = json::array();
  for (const auto& o : file.claimed_orders) orders.push_back({o.eps, o.delta});
  const json j = {{"schema_version", file.schema_version},
                  {"name", file.sequence.name()},
                  {"target", to_string(file.sequence.target())},
                  {"symmetric", file.sequence.symmetric()},
                  {"pulses", pulses},
                  {"provenance", file.provenance},
                  {"claimed_orders", orders}};
  return j.dump(2) + "\n";
}

SequenceFile sequence_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("sequence file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("sequence file must hold a JSON object");
  const int version = field<int>(j, "schema_version");
  if (version != kSequenceSchemaVersion) {
    throw FormatError("unsupported schema_version " + std::to_string(version));
  }
  const auto name = field<std::string>(j, "name");
  GateKind target;
  try {
    target = parse_gate_kind(field<std::string>(j, "target"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  const json& jp = j.contains("pulses") ? j.at("pulses") : json();
  if (!jp.is_array()) throw FormatError("field 'pulses' must be an array");
  std::vector<Pulse> pulses;
  for (const auto& p : jp) {
    if (!p.is_object()) throw FormatError("pulse entries must be objects");
    try {
      pulses.emplace_back(field<double>(p, "omega"), field<double>(p, "tau"), read_phase(p));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("invalid pulse: ") + e.what());
    }
  }
  SequenceFile out{version, CompositeSequence("pending", {Pulse(1.0, 1.0, 0.0)}), "", {}};
  try {
    out.sequence = CompositeSequence(name, std::move(pulses), target, j.value("symmetric", false));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid sequence: ") + e.what());
  }
  out.provenance = j.value("provenance", std::string());
  if (j.contains("claimed_orders")) {
    for (const auto& o : j.at("claimed_orders")) {
      if (!o.is_array() || o.size() != 2 || !o[0].is_number_integer() || !o[1].is_number_integer()) {
        throw FormatError("claimed_orders entries must be [m, n] integer pairs");
      }
      const DerivativeOrder d{o[0].get<int>(), o[1].get<int>()};
      if (d.eps < 0 || d.delta < 0 || d.total() < 1) throw FormatError("claimed_orders entries need m, n >= 0, m + n >= 1");
      out.claimed_orders.push_back(d);
    }
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string grid_to_csv(const LandscapeGrid& grid) {
  std::string out = "epsilon,delta,infidelity\n";
  for (std::size_t i = 0; i < grid.eps_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.delta_axis.size(); ++j) {
      out += format("%.12e", grid.eps_axis[i]);
      out += ',';
      out += format("%.12e", grid.delta_axis[j]);
      out += ',';
      out += format("%.12e", grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out += '\n';
    }
  }
  return out;
}

LandscapeGrid grid_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "epsilon,delta,infidelity") {
    throw FormatError("grid CSV must start with the header 'epsilon,delta,infidelity'");
  }
  struct Row {
    double e, d, v;
  };
  std::vector<Row> rows;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    Row r{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r.e, &r.d, &r.v) != 3) {
      throw FormatError("grid CSV line " + std::to_string(lineno) + " is malformed");
    }
    rows.push_back(r);
  }
  LandscapeGrid g;
  for (const auto& r : rows) {
    if (g.eps_axis.empty() || r.e != g.eps_axis.back()) g.eps_axis.push_back(r.e);
  }
  const std::size_t ni = g.eps_axis.size();
  if (ni == 0 || rows.size() % ni != 0) throw FormatError("grid CSV is not a complete tensor grid");
  const std::size_t nj = rows.size() / ni;
  for (std::size_t j = 0; j < nj; ++j) g.delta_axis.push_back(rows[j].d);
  g.values.resize(static_cast<Eigen::Index>(ni), static_cast<Eigen::Index>(nj));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t i = k / nj;
    const std::size_t j = k % nj;
    if (rows[k].e != g.eps_axis[i] || rows[k].d != g.delta_axis[j]) {
      throw FormatError("grid CSV rows are not in row-major epsilon order");
    }
    g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[k].v;
  }
  return g;
}

std::string contours_to_json(const ContourSet& set) {
  json levels = json::array();
  for (std::size_t k = 0; k < set.levels.size(); ++k) {
    json lines = json::array();
    for (const auto& pl : set.lines[k]) {
      json verts = json::array();
      for (const auto& v : pl.vertices) verts.push_back({v.x(), v.y()});
      lines.push_back({{"closed", pl.closed}, {"vertices", verts}});
    }
    levels.push_back({{"level", set.levels[k]}, {"polylines", lines}});
  }
  const json j = {{"axes", {"epsilon", "delta"}}, {"contours", levels}};
  return j.dump(1) + "\n";
}

std::string contours_to_svg(const LandscapeGrid& grid, const ContourSet& set, std::string_view title) {
  constexpr double size = 480.0;
  constexpr double margin = 50.0;
  const double e0 = grid.eps_axis.front();
  const double e1 = grid.eps_axis.back();
  const double d0 = grid.delta_axis.front();
  const double d1 = grid.delta_axis.back();
  // delta runs along x, epsilon along y (upwards).
  auto px = [&](const Eigen::Vector2d& v) {
    const double x = margin + (v.y() - d0) / (d1 - d0) * size;
    const double y = margin + (e1 - v.x()) / (e1 - e0) * size;
    return format("%.2f", x) + "," + format("%.2f", y);
  };
  static const char* palette[] = {"#08306b", "#2171b5", "#6baed6", "#c6dbef", "#666666"};
  std::ostringstream s;
  const double full = size + 2 * margin;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << full << "\" height=\"" << full << "\">\n";
  s << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size << "\" height=\"" << size
    << "\" fill=\"white\" stroke=\"black\"/>\n";
  s << "<text x=\"" << full / 2 << "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
  s << "<text x=\"" << full / 2 << "\" y=\"" << full - 12 << "\" text-anchor=\"middle\" font-size=\"13\">delta ["
    << format("%g", d0) << ", " << format("%g", d1) << "]</text>\n";
  s << "<text x=\"16\" y=\"" << full / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
    << full / 2 << ")\">epsilon [" << format("%g", e0) << ", " << format("%g", e1) << "]</text>\n";
  for (std::size_t k = 0; k < set.levels.size(); ++k) {
    const char* color = palette[std::min<std::size_t>(k, 4)];
    for (const auto& pl : set.lines[k]) {
      s << (pl.closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < pl.vertices.size(); ++i) s << (i ? " " : "") << px(pl.vertices[i]);
      s << "\"/>\n";
    }
    s << "<text x=\"" << margin + size - 4 << "\" y=\"" << margin + 16 + 14 * k
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << format("%g", set.levels[k])
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string optimization_report_json(const OptimizerSpec& spec, const OptResult& result,
                                     const CompositeSequence& best) {
  json starts = json::array();
  for (const auto& s : result.starts) {
    starts.push_back({{"index", s.index}, {"objective", s.objective}, {"iterations", s.iterations}});
  }
  json pulses = json::array();
  for (const auto& p : best.pulses()) {
    pulses.push_back({{"omega", p.omega()}, {"tau", p.tau()}, {"phase_over_pi", phase_over_pi(p.phase())}});
  }
  const json j = {
      {"objective", result.objective},
      {"best_start", result.best_start},
      {"total_area_over_pi", best.total_area()},
      {"pulses", pulses},
      {"spec",
       {{"n_pulses", spec.n_pulses},
        {"target", to_string(spec.target)},
        {"symmetric", spec.symmetric},
        {"vary_amplitudes", spec.vary_amplitudes},
        {"amplitude_bounds", {spec.amplitude_lo, spec.amplitude_hi}},
        {"tau", spec.tau},
        {"fixed_omega", spec.fixed_omega},
        {"box", {spec.box.eps_lo, spec.box.eps_hi, spec.box.delta_lo, spec.box.delta_hi}},
        {"grid", {spec.grid.n_eps, spec.grid.n_delta}},
        {"starts", spec.starts},
        {"max_iters", spec.max_iters},
        {"patience", spec.patience},
        {"min_improvement", spec.min_improvement},
        {"seed", spec.seed},
        {"area_penalty", spec.area_penalty}}},
      {"adam",
       {{"learning_rate", result.learning_rate},
        {"beta1", result.beta1},
        {"beta2", result.beta2},
        {"epsilon", result.adam_epsilon},
        {"clip_norm", result.clip_norm}}},
      {"per_start", starts},
      {"trace_length", result.trace.size()},
  };
  return j.dump(2) + "\n";
}

}  // namespace cpg

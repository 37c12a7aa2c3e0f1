#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cpgates/catalog.hpp"
#include "cpgates/landscape.hpp"
#include "cpgates/optimizer.hpp"

namespace cpg {

/// Malformed input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSequenceSchemaVersion = 1;

/// On-disk sequence description. Phases are stored in units of pi.
struct SequenceFile {
  int schema_version = kSequenceSchemaVersion;
  CompositeSequence sequence;
  std::string provenance;
  std::vector<DerivativeOrder> claimed_orders;
};

SequenceFile to_sequence_file(const SequenceRecord& rec);

/// phase / pi, nudged by a few ulps when needed so that the value times pi
/// reproduces the stored phase bit for bit.
double phase_over_pi(double phase);

std::string sequence_to_json(const SequenceFile& file);
SequenceFile sequence_from_json(std::string_view text);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

/// `epsilon,delta,infidelity`, row-major in epsilon, %.12e.
std::string grid_to_csv(const LandscapeGrid& grid);
LandscapeGrid grid_from_csv(std::string_view text);

std::string contours_to_json(const ContourSet& set);

/// Static picture of the contour lines inside the grid box.
std::string contours_to_svg(const LandscapeGrid& grid, const ContourSet& set, std::string_view title);

std::string optimization_report_json(const OptimizerSpec& spec, const OptResult& result,
                                     const CompositeSequence& best);

}  // namespace cpg

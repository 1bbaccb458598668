#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qmerl/merl.hpp"

namespace qmerl {

inline constexpr int kScenarioFormatVersion = 1;

/// Malformed scenario document. `field()` is a JSON pointer to the offending
/// field, or "line L, column C" for syntax errors.
class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

nlohmann::json parse_scenario_text(const std::string& text);
nlohmann::json read_scenario_file(const std::string& path);

/// Validates the document and builds the scenario it describes.
MerlScenario build_scenario(const nlohmann::json& doc);

/// Lossless document: explicit amplitudes (or density) and explicit matrices.
nlohmann::json scenario_to_json(const MerlScenario& scenario);

/// Named matrix builders accepted in observable specs (sigma_x, J_z, ...).
ComplexMatrix named_matrix(const std::string& name);

nlohmann::json spectrum_to_json(const MerlSpectrum& spectrum);

/// One-row CSV: L0..LN, split1..splitN, splitCount, prunedMass, verdict.
std::string spectrum_csv_header(std::size_t control_count);
std::string spectrum_csv_row(const MerlSpectrum& spectrum);

/// 17 significant digits.
std::string format_real(double value);

}  // namespace qmerl

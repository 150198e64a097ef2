#pragma once

#include <optional>
#include <string>

#include "cayley/dynamics.hpp"
#include "cayley/rates.hpp"

namespace cayley {

// Rate file: {"xi": <int>=2>, "rates": {"lk<-nm": <rate>=0>, ...}}.
// Missing transitions default to 0; unknown keys, diagonal transitions and
// malformed entries are rejected (std::invalid_argument with the offending
// key). Other than pair-key syntax no physics is checked here; symmetry and
// autonomy are separate validations.
RateModel parse_rate_model(const std::string& json_text);
RateModel load_rate_model(const std::string& path);
std::string rate_model_to_json(const RateModel& model);

// Initial shell profile: either {"kind": "per-shell", "values": [...]} or
// {"step": {"height": h, "radius": r}}.
struct InitialProfile {
  std::optional<DensityField> field;  // per-shell values
  std::optional<StepProfile> step;
};
InitialProfile parse_initial_profile(const std::string& json_text);
InitialProfile load_initial_profile(const std::string& path);

// Round-trip-safe decimal formatting (17 significant digits).
std::string format_double(double v);

}  // namespace cayley

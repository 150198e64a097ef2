#include "cayley/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cayley {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace

RateModel parse_rate_model(const std::string& json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw std::invalid_argument("rate file must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "xi" && key != "rates") {
      throw std::invalid_argument("unknown key \"" + key + "\" in rate file");
    }
  }
  if (!j.contains("xi") || !j["xi"].is_number_integer()) {
    throw std::invalid_argument("rate file needs an integer \"xi\"");
  }
  RateModel model;
  model.xi = j["xi"].get<int>();
  if (model.xi < 2) throw std::invalid_argument("\"xi\" must be >= 2");
  if (j.contains("rates")) {
    if (!j["rates"].is_object()) {
      throw std::invalid_argument("\"rates\" must be an object of transition entries");
    }
    for (const auto& [key, value] : j["rates"].items()) {
      const auto [from, to] = parse_transition_key(key);  // rejects diagonals
      if (!value.is_number()) {
        throw std::invalid_argument("rate \"" + key + "\" must be a number");
      }
      model.rates[from][to] = value.get<double>();
    }
  }
  return model;
}

RateModel load_rate_model(const std::string& path) {
  return parse_rate_model(read_file(path));
}

std::string rate_model_to_json(const RateModel& model) {
  json rates = json::object();
  for (int from = 0; from < kNumPairStates; ++from) {
    for (int to = 0; to < kNumPairStates; ++to) {
      if (from != to && model.rates[from][to] != 0.0) {
        rates[transition_key(from, to)] = model.rates[from][to];
      }
    }
  }
  return json{{"xi", model.xi}, {"rates", rates}}.dump(2);
}

InitialProfile parse_initial_profile(const std::string& json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw std::invalid_argument("profile must be a JSON object");
  InitialProfile profile;
  if (j.contains("step")) {
    for (const auto& [key, value] : j.items()) {
      if (key != "step") throw std::invalid_argument("unknown key \"" + key + "\" next to step");
    }
    const json& s = j["step"];
    if (!s.is_object() || !s.contains("height") || !s.contains("radius")) {
      throw std::invalid_argument("step profile needs \"height\" and \"radius\"");
    }
    StepProfile step;
    step.height = s["height"].get<double>();
    step.radius = s["radius"].get<int>();
    if (step.radius < 0) throw std::invalid_argument("step radius must be >= 0");
    profile.step = step;
    return profile;
  }
  if (!j.contains("kind") || j["kind"].get<std::string>() != "per-shell" ||
      !j.contains("values") || !j["values"].is_array()) {
    throw std::invalid_argument(
        "profile must be {\"kind\":\"per-shell\",\"values\":[...]} or {\"step\":{...}}");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "values") {
      throw std::invalid_argument("unknown key \"" + key + "\" in per-shell profile");
    }
  }
  std::vector<double> values;
  for (const auto& v : j["values"]) values.push_back(v.get<double>());
  profile.field = DensityField::per_shell(std::move(values));
  return profile;
}

InitialProfile load_initial_profile(const std::string& path) {
  return parse_initial_profile(read_file(path));
}

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

}  // namespace cayley

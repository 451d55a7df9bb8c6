#include "arcroll/config.hpp"

#include "json.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace arcroll {

namespace {

using nlohmann::json;

constexpr const char* kDoubleKeys[] = {"radius_mm",          "arc_mass_g",
                                       "shift_mass_g",       "body_length_mm",
                                       "grid_resolution_deg", "increment_deg",
                                       "shift_rate_deg_s"};
constexpr const char* kIntKeys[] = {"steps_per_rev", "revs_per_arc", "microstep_factor"};

double* double_slot(RunConfig& c, const std::string& key) {
  if (key == "radius_mm") return &c.radius_mm;
  if (key == "arc_mass_g") return &c.arc_mass_g;
  if (key == "shift_mass_g") return &c.shift_mass_g;
  if (key == "body_length_mm") return &c.body_length_mm;
  if (key == "grid_resolution_deg") return &c.grid_resolution_deg;
  if (key == "increment_deg") return &c.increment_deg;
  if (key == "shift_rate_deg_s") return &c.shift_rate_deg_s;
  return nullptr;
}

int* int_slot(RunConfig& c, const std::string& key) {
  if (key == "steps_per_rev") return &c.steps_per_rev;
  if (key == "revs_per_arc") return &c.revs_per_arc;
  if (key == "microstep_factor") return &c.microstep_factor;
  return nullptr;
}

}  // namespace

RobotParams RunConfig::robot() const {
  RobotParams p;
  p.arc1 = {radius_mm, arc_mass_g, shift_mass_g};
  p.arc2 = {radius_mm, arc_mass_g, shift_mass_g};
  p.body_length_mm = body_length_mm;
  return p;
}

void RunConfig::validate() const {
  robot().validate();
  if (steps_per_rev <= 0 || revs_per_arc <= 0) {
    throw std::invalid_argument("steps_per_rev and revs_per_arc must be positive");
  }
  if (microstep_factor != 1 && microstep_factor != 2 && microstep_factor != 4 &&
      microstep_factor != 8 && microstep_factor != 16 && microstep_factor != 32) {
    throw std::invalid_argument("microstep_factor must be 1, 2, 4, 8, 16 or 32");
  }
  bool res_ok = false;
  for (double r : {0.5, 1.0, 2.0, 5.0, 10.0}) res_ok = res_ok || grid_resolution_deg == r;
  if (!res_ok) {
    throw std::invalid_argument("grid_resolution_deg must be one of 0.5, 1, 2, 5, 10");
  }
  if (!(increment_deg > 0.0) || !(shift_rate_deg_s > 0.0)) {
    throw std::invalid_argument("increment_deg and shift_rate_deg_s must be positive");
  }
}

RunConfig load_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (double* d = double_slot(c, key)) {
      if (!value.is_number()) {
        throw std::invalid_argument("config key '" + key + "' must be a number");
      }
      *d = value.get<double>();
    } else if (int* i = int_slot(c, key)) {
      if (!value.is_number_integer()) {
        throw std::invalid_argument("config key '" + key + "' must be an integer");
      }
      *i = value.get<int>();
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  for (const char* key : kDoubleKeys) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("missing config key '") + key + "'");
    }
  }
  for (const char* key : kIntKeys) {
    if (!j.contains(key)) {
      throw std::invalid_argument(std::string("missing config key '") + key + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig load_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_run_config(buf.str());
}

void save_run_config(std::ostream& out, const RunConfig& config) {
  json j;
  j["radius_mm"] = config.radius_mm;
  j["arc_mass_g"] = config.arc_mass_g;
  j["shift_mass_g"] = config.shift_mass_g;
  j["body_length_mm"] = config.body_length_mm;
  j["steps_per_rev"] = config.steps_per_rev;
  j["revs_per_arc"] = config.revs_per_arc;
  j["microstep_factor"] = config.microstep_factor;
  j["grid_resolution_deg"] = config.grid_resolution_deg;
  j["increment_deg"] = config.increment_deg;
  j["shift_rate_deg_s"] = config.shift_rate_deg_s;
  out << j.dump(2) << '\n';
}

}  // namespace arcroll

#pragma once

#include <string>

#include "thermolearn/dissipative.hpp"
#include "thermolearn/mlp.hpp"

namespace thermo::io {

// Model file payload. kind is one of "scalar_G", "dissipative_force",
// "raw_force"; force kinds carry the velocity dimension n and whether the
// antisymmetric head is enabled.
struct StoredModel {
  std::string kind = "scalar_G";
  nets::MlpModel net;
  int n = 0;
  bool antisymmetric_part = false;

  nets::DissipativeForceModel as_dissipative() const;
};

void save_model(const StoredModel& m, const std::string& path);
StoredModel load_model(const std::string& path);

}  // namespace thermo::io

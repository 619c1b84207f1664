#include "thermolearn/model_io.hpp"

#include <fstream>

#include "json.hpp"

namespace thermo::io {

using nlohmann::json;

nets::DissipativeForceModel StoredModel::as_dissipative() const {
  if (kind != "dissipative_force")
    throw std::runtime_error("model kind is '" + kind +
                             "', not dissipative_force");
  return nets::DissipativeForceModel{net, n, antisymmetric_part};
}

void save_model(const StoredModel& m, const std::string& path) {
  json j;
  j["kind"] = m.kind;
  j["arch"]["input"] = m.net.arch.input_dim;
  j["arch"]["hidden"] = m.net.arch.hidden;
  j["arch"]["output"] = m.net.arch.output_dim;
  j["arch"]["activation"] = nets::activation_name(m.net.arch.activation);
  j["params"] = m.net.params;
  if (m.kind != "scalar_G") {
    j["n"] = m.n;
    j["antisymmetric"] = m.antisymmetric_part;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

StoredModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  json j = json::parse(f);
  StoredModel m;
  m.kind = j.at("kind").get<std::string>();
  m.net.arch.input_dim = j.at("arch").at("input").get<int>();
  m.net.arch.hidden = j.at("arch").at("hidden").get<std::vector<int>>();
  m.net.arch.output_dim = j.at("arch").at("output").get<int>();
  m.net.arch.activation = nets::activation_from_name(
      j.at("arch").value("activation", "sigmoid"));
  m.net.params = j.at("params").get<Vec>();
  if (static_cast<int>(m.net.params.size()) != nets::param_count(m.net.arch))
    throw std::runtime_error("model params length does not match arch in " +
                             path);
  m.n = j.value("n", 0);
  m.antisymmetric_part = j.value("antisymmetric", false);
  return m;
}

}  // namespace thermo::io

#include "thermolearn/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace thermo::io {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void append_state_columns(std::string& header, const char* suffix, int n_q,
                          int n_v, int P) {
  for (int j = 1; j <= n_q; ++j)
    header += ",q" + std::string(suffix) + "_" + std::to_string(j);
  for (int j = 1; j <= n_v; ++j)
    header += ",v" + std::string(suffix) + "_" + std::to_string(j);
  for (int j = 1; j <= P; ++j)
    header += ",T" + std::string(suffix) + "_" + std::to_string(j);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

void save_dataset(const TrajectoryDataset& d, const std::string& csv_path,
                  const std::string& meta_path) {
  const int n_q = d.meta.n_q;
  const int P = d.meta.P;
  const int n_v = d.meta.kind == StateKind::kReduced ? 3 : n_q;

  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  std::string header = "traj_id,h";
  append_state_columns(header, "0", n_q, n_v, P);
  append_state_columns(header, "f", n_q, n_v, P);
  csv << header << "\n";

  auto write_state = [&](const ObservableState& s) {
    for (double x : s.q) csv << "," << format_double(x);
    for (double x : s.v) csv << "," << format_double(x);
    for (double x : s.T) csv << "," << format_double(x);
  };
  for (const auto& pair : d.pairs) {
    csv << pair.traj_id << "," << format_double(pair.h);
    write_state(pair.start);
    write_state(pair.end);
    csv << "\n";
  }

  json meta;
  meta["system"] = d.meta.system;
  meta["kind"] = d.meta.kind == StateKind::kThermal ? "thermal" : "reduced";
  meta["n_q"] = d.meta.n_q;
  meta["P"] = d.meta.P;
  meta["h"] = d.meta.h;
  meta["n_traj"] = d.meta.n_traj;
  meta["traj_len"] = d.meta.traj_len;
  meta["seed"] = d.meta.seed;
  meta["rel_tol"] = d.meta.rel_tol;
  meta["abs_tol"] = d.meta.abs_tol;
  meta["generator"] = d.meta.generator;
  std::ofstream mf(meta_path);
  if (!mf) throw std::runtime_error("cannot write " + meta_path);
  mf << meta.dump(2) << "\n";
}

TrajectoryDataset load_dataset(const std::string& csv_path,
                               const std::string& meta_path) {
  TrajectoryDataset d;
  {
    std::ifstream mf(meta_path);
    if (!mf) throw std::runtime_error("cannot read " + meta_path);
    json meta = json::parse(mf);
    d.meta.system = meta.value("system", "");
    d.meta.kind = meta.value("kind", "thermal") == "reduced"
                      ? StateKind::kReduced
                      : StateKind::kThermal;
    d.meta.n_q = meta.value("n_q", 0);
    d.meta.P = meta.value("P", 1);
    d.meta.h = meta.value("h", 0.0);
    d.meta.n_traj = meta.value("n_traj", 0);
    d.meta.traj_len = meta.value("traj_len", 0);
    d.meta.seed = meta.value("seed", std::uint64_t{0});
    d.meta.rel_tol = meta.value("rel_tol", 0.0);
    d.meta.abs_tol = meta.value("abs_tol", 0.0);
    d.meta.generator = meta.value("generator", "");
  }

  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot read " + csv_path);
  std::string line;
  if (!std::getline(csv, line))
    throw std::runtime_error("empty dataset CSV: " + csv_path);

  const int n_q = d.meta.n_q;
  const int P = d.meta.P;
  const int n_v = d.meta.kind == StateKind::kReduced ? 3 : n_q;
  const std::size_t expect = 2 + 2 * (n_q + n_v + P);
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != expect)
      throw std::runtime_error("bad CSV row width in " + csv_path);
    ObservablePair pair;
    pair.traj_id = std::stoi(fields[0]);
    pair.h = std::stod(fields[1]);
    std::size_t k = 2;
    auto read_state = [&]() {
      ObservableState s;
      for (int j = 0; j < n_q; ++j) s.q.push_back(std::stod(fields[k++]));
      for (int j = 0; j < n_v; ++j) s.v.push_back(std::stod(fields[k++]));
      for (int j = 0; j < P; ++j) s.T.push_back(std::stod(fields[k++]));
      return s;
    };
    pair.start = read_state();
    pair.end = read_state();
    d.pairs.push_back(std::move(pair));
  }
  return d;
}

}  // namespace thermo::io

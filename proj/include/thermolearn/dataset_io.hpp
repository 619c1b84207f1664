#pragma once

#include <string>

#include "thermolearn/states.hpp"

namespace thermo::io {

/// Round-trippable decimal formatting used in every CSV this project writes.
std::string format_double(double x);

// Dataset CSV: one row per pair, header mandatory, columns
// traj_id,h,q0_*,v0_*,T0_*,qf_*,vf_*,Tf_* (reduced sets have zero q columns
// and v carries Omega). Dimensions and provenance live in the sibling
// metadata JSON.
void save_dataset(const TrajectoryDataset& d, const std::string& csv_path,
                  const std::string& meta_path);

TrajectoryDataset load_dataset(const std::string& csv_path,
                               const std::string& meta_path);

}  // namespace thermo::io

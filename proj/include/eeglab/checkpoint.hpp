#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "eeglab/model.hpp"

namespace eeglab {

// Generic EEGM blob: magic, version, JSON descriptor, named float32 arrays.
struct EegmBlob {
    nlohmann::json descriptor;
    std::vector<std::pair<std::string, std::vector<float>>> arrays;

    const std::vector<float>& array(const std::string& name) const;
};

void write_eegm(const std::string& path, const EegmBlob& blob);
EegmBlob read_eegm(const std::string& path);

// Model checkpoints use descriptor kind "model"; parameters are stored as
// float32, so a load/save round trip quantizes to single precision.
void save_model(const std::string& path, const TrainedModel& m);
TrainedModel load_model(const std::string& path);

}  // namespace eeglab

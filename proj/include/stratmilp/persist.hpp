#ifndef STRATMILP_PERSIST_HPP
#define STRATMILP_PERSIST_HPP

#include <json.hpp>
#include <string>

#include "stratmilp/datagen.hpp"
#include "stratmilp/inference.hpp"
#include "stratmilp/learner.hpp"
#include "stratmilp/model.hpp"

namespace stratmilp {

using nlohmann::json;

/// Writes to a temp file in the same directory, then renames into place.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// JSON codecs. Infinite bounds serialize as null; every top-level document
// carries a format_version field.
json instance_to_json(const MILPInstance& inst);
MILPInstance instance_from_json(const json& j);

json family_to_json(const ParameterizedFamily& fam);
ParameterizedFamily family_from_json(const json& j);

json library_to_json(const StrategyLibrary& lib);
StrategyLibrary library_from_json(const json& j);

json model_to_json(const RewardModel& m);
RewardModel model_from_json(const json& j);

void save_library(const StrategyLibrary& lib, const std::string& path);
StrategyLibrary load_library(const std::string& path);

void save_model(const RewardModel& m, const std::string& path);
RewardModel load_model(const std::string& path);

/// Dataset persists as a directory: family.json, meta.json, library.json,
/// records.ndjson, and (when filled) rewards.ndjson.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

std::string metrics_to_csv(const Metrics& mt);
void save_metrics(const Metrics& mt, const std::string& path);

}  // namespace stratmilp

#endif

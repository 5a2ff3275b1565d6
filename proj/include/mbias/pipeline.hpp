#pragma once

#include "mbias/model.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace mbias::cli {

/// Flat `key = value` document: one pair per line, `#` comments, optional
/// double quotes around values, `[section]` lines ignored. Later keys win.
std::map<std::string, std::string> parse_flat_config(std::string_view content);

/// Applies one training setting given as text. Returns false for keys that
/// are not training settings; throws DataError for malformed values.
bool apply_train_setting(TrainConfig& cfg, const std::string& key, const std::string& value);

/// Reads a TrainConfig from a `.json` file or a flat key-value file.
TrainConfig load_train_config(const std::filesystem::path& path);

struct PipelineConfig {
    std::filesystem::path gold;
    std::filesystem::path headlines;
    std::filesystem::path leanings;
    std::filesystem::path lexicons;
    std::optional<int> word_threshold;
    TrainConfig train;
    int k = 5;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    int workers = 1;

    /// Throws DataError when a referenced path is missing or a numeric
    /// setting is out of range.
    void validate() const;
};

/// Relative paths are resolved against `base_dir`.
PipelineConfig pipeline_config_from(const std::map<std::string, std::string>& values,
                                    const std::filesystem::path& base_dir);

/// Runs every stage configured in `cfg` and returns the combined report.
nlohmann::ordered_json run_report(const PipelineConfig& cfg, std::ostream& diagnostics);

/// Renders a JSON document as an aligned two-column table.
std::string render_table(const nlohmann::ordered_json& doc);

/// Entry point of the `mbias` executable. Exit codes: 0 success, 1 usage
/// error, 2 data/validation error, 3 runtime/training error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mbias::cli

#ifndef DARKPROBE_EXPERIMENTS_HPP
#define DARKPROBE_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

namespace darkprobe {

inline constexpr const char* kVersion = "0.1.0";

// schema violations and malformed configs; the CLI maps these to exit code 2
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  // overrides config
  std::optional<uint64_t> seed;                     // overrides config
  int threads = 0;                                  // 0 = hardware concurrency
};

// runs the experiment described by a JSON config: validates the schema,
// writes the data CSVs and a run manifest into the output directory.
// Returns the manifest (also written as run_manifest.json).
nlohmann::json run_experiment(const nlohmann::json& config, const RunOptions& opts = {});
nlohmann::json run_experiment_file(const std::filesystem::path& config_path,
                                   const RunOptions& opts = {});

}  // namespace darkprobe

#endif

#pragma once

#include "bathdisc/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bathdisc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Ordered key=value record written next to every command's outputs.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void add_note(const std::string& note);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  int notes_ = 0;
};

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<Precision> precision;
  bool deterministic = false;
  std::vector<std::filesystem::path> inputs;  // compare
};

// Each command writes its outputs into out_dir (created if missing).
void cmd_discretize(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_evolve(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_tmax_scan(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_mastereq(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_manybody(const RunConfig& config, const std::filesystem::path& out_dir);
void cmd_compare(const std::filesystem::path& first, const std::filesystem::path& second,
                 const std::filesystem::path& out_dir);

inline const std::vector<std::string> kCommands{"discretize", "evolve", "tmax-scan",
                                                "mastereq", "manybody", "compare"};

// Loads the config, applies overrides, runs the command and maps failures to
// exit codes (2 config, 3 numerical tolerance), reporting them on stderr.
int run_command(const std::string& name, const CommandOptions& options);

}  // namespace bathdisc

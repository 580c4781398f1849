#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

namespace cnb::run {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSingularity = 3;
inline constexpr int kExitDrift = 4;
inline constexpr int kExitFamily = 5;

/// Parses a JSON config file; parse failures surface as config errors.
nlohmann::json load_config_file(const std::string& path);

/// FNV-1a hash of the canonical dump of the effective config; embedded in
/// every output file for provenance.
std::string config_hash(const nlohmann::json& cfg);

/// Maps a thrown cnb::error to the exit-code contract above.
int exit_code_for(const std::exception& e);

int cmd_simulate(const nlohmann::json& cfg, const std::string& out_dir, std::ostream& out);
int cmd_build_re(const nlohmann::json& cfg, const std::string& out_dir, std::ostream& out);
int cmd_verify_re(const nlohmann::json& cfg, const std::string& out_dir, std::ostream& out);
int cmd_sweep(const nlohmann::json& cfg, const std::string& out_dir, std::ostream& out);
int cmd_scan(const nlohmann::json& cfg, const std::string& out_dir, std::ostream& out);
int cmd_f_profile(const nlohmann::json& cfg, const std::string& out_dir, std::ostream& out);

/// Dispatch by command name with uniform error handling: catches cnb errors,
/// prints the message to `err`, and returns the mapped exit code.
int dispatch(const std::string& command, const nlohmann::json& cfg, const std::string& out_dir,
             std::ostream& out, std::ostream& err);

}  // namespace cnb::run

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rydpol {

inline constexpr std::string_view kVersion = "0.1.0";

/// Exit codes returned by dispatch.
inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Artifacts go to
/// --output-dir together with <subcommand>.manifest.json; the main JSON
/// result is also printed to `out`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string file_checksum(const std::filesystem::path& path);

}  // namespace rydpol

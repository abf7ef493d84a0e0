#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

// The four CLI entry points, separated from argument parsing so tests can
// drive them directly. Exit codes: 0 ok, 1 inequality/consistency failure,
// 2 bad input, 3 non-physical parameters, 4 I/O failure.

namespace cvmono {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitNonPhysical = 3;
inline constexpr int kExitIo = 4;

int cmd_scenario(const std::string& params_json, bool with_closed_form, bool json_output,
                 std::ostream& out, std::ostream& err);

/// Exactly one of preset_name / spec_json must be non-empty.
int cmd_sweep(const std::string& preset_name, const std::string& spec_json,
              const std::string& out_path, std::ostream& out, std::ostream& err);

int cmd_fuzz(std::uint64_t trials, std::uint64_t seed, int depth, std::ostream& out,
             std::ostream& err);

int cmd_mc(const std::string& params_json, std::uint64_t count, std::uint64_t seed,
           bool json_output, std::ostream& out, std::ostream& err);

}  // namespace cvmono

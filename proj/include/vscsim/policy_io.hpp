#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "vscsim/agents.hpp"

namespace vscsim {

inline constexpr int kPolicyFormatVersion = 1;

using PolicyTable = std::variant<QTable, FuzzyRuleBase>;

/// Text format, one record per line:
///
///   vscsim-policy 1
///   kind QL|FQL
///   coordinated 0|1
///   variant standard|label-weighted      (FQL only)
///   alpha <a>
///   gamma <g>
///   inputs <n>                       (FQL only)
///   mf trapezoid|interval a b c d    (FQL only, 5 per input)
///   rows <R>
///   <q0> <q1> <q2>                   (R lines)
///
/// Doubles are written in shortest round-trip form, so import is bit-exact.
std::string policy_to_text(const PolicyTable& table);
PolicyTable policy_from_text(std::string_view text);

void save_policy(const std::filesystem::path& path, const PolicyTable& table);
PolicyTable load_policy(const std::filesystem::path& path);

/// Learnable state of an agent; CapabilityError for fixed policies.
PolicyTable policy_of(const Agent& agent);
Algorithm policy_algorithm(const PolicyTable& table);

/// Agent around a loaded table with its own RNG stream.
std::unique_ptr<Agent> agent_from_policy(PolicyTable table, std::uint64_t seed, double eps);

}  // namespace vscsim

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedrun/errors.hpp"

namespace fedrun::gov {

enum class Effect : uint8_t { deny = 0, permit = 1 };

enum class Action : uint8_t { push_update, pull_model, join_study, read_metrics };

const char* action_name(Action a);
Action action_from_name(const std::string& name);
const char* effect_name(Effect e);

struct TimeWindow {
    int64_t not_before = 0;  // UTC milliseconds, inclusive
    int64_t not_after = 0;
};

struct RoundRange {
    uint32_t first = 0;  // inclusive
    uint32_t last = 0;
};

// Authorization rule. subject/resource are exact matchers or "*".
struct PolicyRule {
    std::string rule_id;
    Effect effect = Effect::deny;
    std::string subject;
    Action action = Action::push_update;
    std::string resource;
    std::optional<TimeWindow> window;
    std::optional<RoundRange> rounds;
};

struct Request {
    std::string subject;
    Action action = Action::push_update;
    std::string resource;
    int64_t timestamp_ms = 0;
    std::optional<uint32_t> round;
};

struct Decision {
    Effect effect = Effect::deny;
    std::string rule_id = "default-deny";
    int64_t timestamp_ms = 0;
};

// First-applicable rule wins, evaluated in list order; no match means
// Deny with rule_id "default-deny". Total: never throws.
Decision evaluate(const Request& request, std::span<const PolicyRule> policy_set) noexcept;

// rule_ids must be unique within a set
void validate_policy(std::span<const PolicyRule> policy_set);

// JSON array of rule objects; unknown keys are errors
std::vector<PolicyRule> load_policy_file(const std::filesystem::path& path);
void write_policy_file(const std::filesystem::path& path, std::span<const PolicyRule> rules);

}  // namespace fedrun::gov

#include "fedrun/gov/policy.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace fedrun::gov {

using nlohmann::json;
using nlohmann::ordered_json;

const char* action_name(Action a) {
    switch (a) {
        case Action::push_update: return "push_update";
        case Action::pull_model: return "pull_model";
        case Action::join_study: return "join_study";
        case Action::read_metrics: return "read_metrics";
    }
    return "?";
}

Action action_from_name(const std::string& name) {
    if (name == "push_update") return Action::push_update;
    if (name == "pull_model") return Action::pull_model;
    if (name == "join_study") return Action::join_study;
    if (name == "read_metrics") return Action::read_metrics;
    throw ConfigError("unknown action: " + name);
}

const char* effect_name(Effect e) { return e == Effect::permit ? "permit" : "deny"; }

static bool matches(const PolicyRule& r, const Request& q) {
    if (r.subject != "*" && r.subject != q.subject) return false;
    if (r.action != q.action) return false;
    if (r.resource != "*" && r.resource != q.resource) return false;
    if (r.window &&
        (q.timestamp_ms < r.window->not_before || q.timestamp_ms > r.window->not_after))
        return false;
    if (r.rounds) {
        if (!q.round) return false;
        if (*q.round < r.rounds->first || *q.round > r.rounds->last) return false;
    }
    return true;
}

Decision evaluate(const Request& request, std::span<const PolicyRule> policy_set) noexcept {
    for (const auto& rule : policy_set)
        if (matches(rule, request))
            return {rule.effect, rule.rule_id, request.timestamp_ms};
    return {Effect::deny, "default-deny", request.timestamp_ms};
}

void validate_policy(std::span<const PolicyRule> policy_set) {
    std::set<std::string> ids;
    for (const auto& r : policy_set) {
        if (r.rule_id.empty()) throw ConfigError("policy rule with empty rule_id");
        if (!ids.insert(r.rule_id).second)
            throw ConfigError("duplicate rule_id: " + r.rule_id);
    }
}

static void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.contains(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

std::vector<PolicyRule> load_policy_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open policy file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("policy file " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) throw ConfigError("policy file must be a JSON array of rules");

    std::vector<PolicyRule> rules;
    for (const auto& item : doc) {
        reject_unknown_keys(item, {"rule_id", "effect", "subject", "action", "resource",
                                   "window", "rounds"},
                            "policy rule");
        PolicyRule r;
        r.rule_id = item.at("rule_id").get<std::string>();
        std::string eff = item.at("effect").get<std::string>();
        if (eff == "permit")
            r.effect = Effect::permit;
        else if (eff == "deny")
            r.effect = Effect::deny;
        else
            throw ConfigError("rule " + r.rule_id + ": effect must be permit or deny");
        r.subject = item.at("subject").get<std::string>();
        r.action = action_from_name(item.at("action").get<std::string>());
        r.resource = item.at("resource").get<std::string>();
        if (item.contains("window")) {
            auto w = item.at("window");
            if (!w.is_array() || w.size() != 2)
                throw ConfigError("rule " + r.rule_id + ": window must be [not_before, not_after]");
            r.window = TimeWindow{w[0].get<int64_t>(), w[1].get<int64_t>()};
        }
        if (item.contains("rounds")) {
            auto rr = item.at("rounds");
            if (!rr.is_array() || rr.size() != 2)
                throw ConfigError("rule " + r.rule_id + ": rounds must be [first, last]");
            r.rounds = RoundRange{rr[0].get<uint32_t>(), rr[1].get<uint32_t>()};
        }
        rules.push_back(std::move(r));
    }
    validate_policy(rules);
    return rules;
}

void write_policy_file(const std::filesystem::path& path, std::span<const PolicyRule> rules) {
    ordered_json doc = ordered_json::array();
    for (const auto& r : rules) {
        ordered_json o;
        o["rule_id"] = r.rule_id;
        o["effect"] = effect_name(r.effect);
        o["subject"] = r.subject;
        o["action"] = action_name(r.action);
        o["resource"] = r.resource;
        if (r.window) o["window"] = {r.window->not_before, r.window->not_after};
        if (r.rounds) o["rounds"] = {r.rounds->first, r.rounds->last};
        doc.push_back(std::move(o));
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write policy file " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace fedrun::gov

#pragma once

#include <span>

#include "fedrun/clock.hpp"
#include "fedrun/fl/message.hpp"
#include "fedrun/fl/transport.hpp"
#include "fedrun/gov/audit.hpp"
#include "fedrun/gov/policy.hpp"

namespace fedrun::gov {

enum class GateResult { sent, denied };

// Transmission gate: the message's (subject, action, resource, round) is
// evaluated against the policy set, the Decision is appended to the audit
// log, and only a Permit lets any byte reach the transport. An audit append
// failure also blocks the send.
GateResult gate_send(fl::Session& session, const fl::Message& msg,
                     std::span<const PolicyRule> policy_set, AuditLog& audit, Clock& clock,
                     const std::string& receiving_site = "");

}  // namespace fedrun::gov

#include "fedrun/gov/gate.hpp"

namespace fedrun::gov {

GateResult gate_send(fl::Session& session, const fl::Message& msg,
                     std::span<const PolicyRule> policy_set, AuditLog& audit, Clock& clock,
                     const std::string& receiving_site) {
    Request req = fl::message_request(msg, receiving_site);
    req.timestamp_ms = clock.now_ms();
    Decision d = evaluate(req, policy_set);

    AuditEvent ev;
    ev.kind = "decision";
    ev.subject = req.subject;
    ev.action = action_name(req.action);
    ev.resource = req.resource;
    ev.effect = effect_name(d.effect);
    ev.rule_id = d.rule_id;
    ev.timestamp_ms = d.timestamp_ms;
    ev.round = req.round;
    audit.append(ev);  // throws on failure: fail closed, nothing transmitted

    if (d.effect != Effect::permit) return GateResult::denied;
    session.send_frame(fl::encode(msg));
    return GateResult::sent;
}

}  // namespace fedrun::gov

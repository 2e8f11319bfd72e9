#include <algorithm>
#include <charconv>
#include <optional>

#include "icp/error.hpp"
#include "icp/policy.hpp"

namespace icp::policy {

namespace {

/// Joins path segments with '.' so `context.git.sha` addresses the flat
/// attribute key "git.sha".
std::string joined_key(const std::vector<std::string>& path) {
    std::string key;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i != 0) key.push_back('.');
        key += path[i];
    }
    return key;
}

std::optional<std::string> lookup(const std::map<std::string, std::string>& attrs,
                                  const std::string& key) {
    auto it = attrs.find(key);
    if (it == attrs.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::string> resolve_attr(const Operand& o, const RequestContext& req) {
    if (o.root == "subject") {
        if (o.path.empty()) {
            return std::nullopt;
        }
        const std::string key = joined_key(o.path);
        if (key == "kind") return std::string(identity::to_string(req.subject.kind));
        if (key == "trust_domain") return req.subject.trust_domain;
        if (key == "uri") return req.subject.canonical_uri;
        return lookup(req.subject.attributes, key);
    }
    if (o.root == "action") {
        if (!o.path.empty()) {
            return std::nullopt;
        }
        return req.action;
    }
    if (o.root == "resource") {
        if (o.path.empty()) return std::nullopt;
        return lookup(req.resource, joined_key(o.path));
    }
    if (o.root == "context") {
        if (o.path.empty()) return std::nullopt;
        return lookup(req.context, joined_key(o.path));
    }
    return std::nullopt;  // unknown roots never resolve (lint flags them)
}

/// Scalar value of an operand, or nullopt for missing attributes and sets.
std::optional<std::string> resolve_scalar(const Operand& o, const RequestContext& req) {
    switch (o.type) {
        case Operand::Type::attr: return resolve_attr(o, req);
        case Operand::Type::string: return o.text;
        case Operand::Type::integer: return std::to_string(o.number);
        case Operand::Type::set: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<std::int64_t> as_int(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return value;
}

bool compare(CmpOp op, const std::string& lhs, const std::string& rhs) {
    auto li = as_int(lhs);
    auto ri = as_int(rhs);
    int cmp;
    if (li && ri) {
        cmp = *li < *ri ? -1 : (*li > *ri ? 1 : 0);
    } else {
        cmp = lhs.compare(rhs);
        cmp = cmp < 0 ? -1 : (cmp > 0 ? 1 : 0);
    }
    switch (op) {
        case CmpOp::eq: return cmp == 0;
        case CmpOp::ne: return cmp != 0;
        case CmpOp::lt: return cmp < 0;
        case CmpOp::le: return cmp <= 0;
        case CmpOp::gt: return cmp > 0;
        case CmpOp::ge: return cmp >= 0;
        default: return false;
    }
}

bool eval_comparison(const Expr& e, const RequestContext& req) {
    if (e.op == CmpOp::in_set) {
        if (e.right.type != Operand::Type::set) {
            return false;
        }
        auto lhs = resolve_scalar(e.left, req);
        if (!lhs) {
            return false;
        }
        for (const auto& item : e.right.items) {
            if (item == *lhs) {
                return true;
            }
        }
        return false;
    }
    auto lhs = resolve_scalar(e.left, req);
    auto rhs = resolve_scalar(e.right, req);
    if (!lhs || !rhs) {
        return false;
    }
    if (e.op == CmpOp::matches) {
        return glob_match(*rhs, *lhs);
    }
    return compare(e.op, *lhs, *rhs);
}

bool eval_expr(const Expr& e, const RequestContext& req) {
    switch (e.type) {
        case Expr::Type::literal: return e.literal;
        case Expr::Type::logical_not: return !eval_expr(*e.child, req);
        case Expr::Type::logical_and: return eval_expr(*e.lhs, req) && eval_expr(*e.rhs, req);
        case Expr::Type::logical_or: return eval_expr(*e.lhs, req) || eval_expr(*e.rhs, req);
        case Expr::Type::comparison: return eval_comparison(e, req);
    }
    return false;
}

void collect_roots(const Expr& e, std::vector<const Operand*>& out) {
    switch (e.type) {
        case Expr::Type::literal: break;
        case Expr::Type::logical_not: collect_roots(*e.child, out); break;
        case Expr::Type::logical_and:
        case Expr::Type::logical_or:
            collect_roots(*e.lhs, out);
            collect_roots(*e.rhs, out);
            break;
        case Expr::Type::comparison:
            if (e.left.type == Operand::Type::attr) out.push_back(&e.left);
            if (e.right.type == Operand::Type::attr) out.push_back(&e.right);
            break;
    }
}

bool known_root(const std::string& root) {
    return root == "subject" || root == "action" || root == "resource" || root == "context";
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
    // Iterative matcher with star backtracking; immune to pathological input.
    std::size_t p = 0, t = 0;
    std::size_t star = std::string_view::npos, star_t = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            star_t = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++star_t;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') {
        ++p;
    }
    return p == pattern.size();
}

Decision evaluate(const PolicySet& set, const RequestContext& request) {
    Decision decision;
    decision.policy_version = set.version;
    decision.trace.reserve(set.policies.size());
    bool any_permit = false;
    bool any_deny = false;
    for (const auto& policy : set.policies) {
        bool matched = eval_expr(*policy.condition, request);
        decision.trace.push_back(TraceEntry{policy.id, matched, policy.effect});
        if (matched) {
            (policy.effect == Effect::permit ? any_permit : any_deny) = true;
        }
    }
    decision.outcome = (any_permit && !any_deny) ? Outcome::permit : Outcome::deny;
    return decision;
}

std::vector<LintWarning> lint(const PolicySet& set) {
    std::vector<LintWarning> warnings;
    for (const auto& policy : set.policies) {
        if (policy.condition->type == Expr::Type::literal && !policy.condition->literal) {
            warnings.push_back({"unreachable", policy.id,
                                "policy '" + policy.id + "' can never match (condition is false)"});
        }
        std::vector<const Operand*> roots;
        collect_roots(*policy.condition, roots);
        std::vector<std::string> flagged;
        for (const Operand* o : roots) {
            if (!known_root(o->root) &&
                std::find(flagged.begin(), flagged.end(), o->root) == flagged.end()) {
                flagged.push_back(o->root);
                warnings.push_back(
                    {"unknown_root", policy.id,
                     "policy '" + policy.id + "' references unknown attribute root '" + o->root +
                         "' (expected subject, action, resource, or context)"});
            }
        }
    }
    // Shadowing: same condition text, conflicting effects.
    for (std::size_t i = 0; i < set.policies.size(); ++i) {
        for (std::size_t j = i + 1; j < set.policies.size(); ++j) {
            const auto& a = set.policies[i];
            const auto& b = set.policies[j];
            if (a.effect != b.effect &&
                pretty_print(*a.condition) == pretty_print(*b.condition)) {
                warnings.push_back({"shadowed", b.id,
                                    "policies '" + a.id + "' and '" + b.id +
                                        "' share a condition with conflicting effects"});
            }
        }
    }
    return warnings;
}

nlohmann::json RequestContext::to_json() const {
    return nlohmann::json{{"subject", subject.to_json()},
                          {"action", action},
                          {"resource", resource},
                          {"context", context}};
}

RequestContext RequestContext::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("subject") || !j.contains("action") ||
        !j.contains("resource")) {
        throw Error(ErrorCode::malformed_request, "request requires subject, action, resource");
    }
    RequestContext req;
    req.subject = identity::UnifiedIdentity::from_json(j["subject"]);
    if (!j["action"].is_string()) {
        throw Error(ErrorCode::malformed_request, "action must be a string");
    }
    req.action = j["action"].get<std::string>();
    if (req.action.empty()) {
        throw Error(ErrorCode::malformed_request, "action must be non-empty");
    }
    auto read_map = [](const nlohmann::json& node, const char* name) {
        std::map<std::string, std::string> out;
        if (!node.is_object()) {
            throw Error(ErrorCode::malformed_request, std::string(name) + " must be an object");
        }
        for (const auto& [k, v] : node.items()) {
            if (!v.is_string()) {
                throw Error(ErrorCode::malformed_request,
                            std::string(name) + "." + k + " must be a string");
            }
            out[k] = v.get<std::string>();
        }
        return out;
    };
    req.resource = read_map(j["resource"], "resource");
    if (req.resource.find("id") == req.resource.end()) {
        throw Error(ErrorCode::malformed_request, "resource.id is required");
    }
    if (j.contains("context")) {
        req.context = read_map(j["context"], "context");
    }
    return req;
}

nlohmann::json Decision::to_json() const {
    nlohmann::json trace_json = nlohmann::json::array();
    for (const auto& entry : trace) {
        trace_json.push_back(nlohmann::json{{"policy_id", entry.policy_id},
                                            {"matched", entry.matched},
                                            {"effect", std::string(to_string(entry.effect))}});
    }
    nlohmann::json j{{"outcome", std::string(to_string(outcome))},
                     {"trace", std::move(trace_json)},
                     {"policy_version", policy_version}};
    if (reason) {
        j["reason"] = *reason;
    }
    return j;
}

Decision Decision::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("outcome") || !j.contains("trace") ||
        !j.contains("policy_version")) {
        throw Error(ErrorCode::malformed_request,
                    "decision requires outcome, trace, policy_version");
    }
    Decision d;
    d.outcome = outcome_from_string(j["outcome"].get<std::string>());
    d.policy_version = j["policy_version"].get<std::string>();
    for (const auto& entry : j["trace"]) {
        TraceEntry t;
        t.policy_id = entry.at("policy_id").get<std::string>();
        t.matched = entry.at("matched").get<bool>();
        t.effect = entry.at("effect").get<std::string>() == "permit" ? Effect::permit
                                                                     : Effect::deny;
        d.trace.push_back(std::move(t));
    }
    if (j.contains("reason") && j["reason"].is_string()) {
        d.reason = j["reason"].get<std::string>();
    }
    return d;
}

}  // namespace icp::policy

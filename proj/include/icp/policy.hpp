#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "icp/identity.hpp"

namespace icp::policy {

enum class Effect { permit, deny };
enum class Outcome { permit, deny };

std::string_view to_string(Effect e);
std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view text);

enum class CmpOp { eq, ne, lt, le, gt, ge, in_set, matches };
std::string_view to_string(CmpOp op);

/// One side of a comparison: an attribute path, a literal, or a string set.
struct Operand {
    enum class Type { attr, string, integer, set };
    Type type = Type::string;
    std::string root;                // attr
    std::vector<std::string> path;   // attr segments after the root
    std::string text;                // string literal
    std::int64_t number = 0;         // integer literal
    std::vector<std::string> items;  // set literal
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Type { literal, logical_not, logical_and, logical_or, comparison };
    Type type = Type::literal;
    bool literal = false;             // literal
    ExprPtr child;                    // logical_not
    ExprPtr lhs, rhs;                 // logical_and / logical_or
    Operand left, right;              // comparison
    CmpOp op = CmpOp::eq;             // comparison
};

struct Policy {
    std::string id;
    Effect effect = Effect::deny;
    ExprPtr condition;
};

/// Immutable after parse; the version digest addresses this exact source text.
struct PolicySet {
    std::vector<Policy> policies;
    std::string version;  // SHA-256 hex of `source`
    std::string source;
};

/// Attribute roots reachable from a request. `subject.kind`, `.trust_domain`
/// and `.uri` resolve to the identity fields; other subject segments resolve
/// through the attribute map. `action` resolves to the action string itself.
struct RequestContext {
    identity::UnifiedIdentity subject;
    std::string action;
    std::map<std::string, std::string> resource;  // at minimum "id"
    std::map<std::string, std::string> context;

    [[nodiscard]] nlohmann::json to_json() const;
    static RequestContext from_json(const nlohmann::json& j);
};

struct TraceEntry {
    std::string policy_id;
    bool matched = false;
    Effect effect = Effect::deny;
};

struct Decision {
    Outcome outcome = Outcome::deny;
    std::vector<TraceEntry> trace;  // one entry per policy evaluated, in set order
    std::string policy_version;
    std::optional<std::string> reason;  // e.g. "out_of_scope" when no policy was consulted

    [[nodiscard]] nlohmann::json to_json() const;
    static Decision from_json(const nlohmann::json& j);
};

/// Parses IPL source. Throws Error(parse_error) with 1-based line/column and
/// an expected-token message, or Error(duplicate_policy_id).
PolicySet parse_policy_set(std::string_view source);

/// Parses multiple named sources (e.g. the files of a policy directory, in
/// order). Each file is parsed separately so errors carry its name; the set
/// version is the digest of the newline-normalized concatenation.
PolicySet parse_policy_files(const std::vector<std::pair<std::string, std::string>>& named_sources);

/// Deny-overrides with default deny. Missing attributes make the enclosing
/// comparison false; evaluation never throws on a valid request.
Decision evaluate(const PolicySet& set, const RequestContext& request);

struct LintWarning {
    std::string code;  // unreachable | unknown_root | shadowed
    std::string policy_id;
    std::string message;
};

std::vector<LintWarning> lint(const PolicySet& set);

/// Canonical text form; parsing it yields a structurally identical AST.
std::string pretty_print(const PolicySet& set);
std::string pretty_print(const Expr& expr);

/// Glob with `*` (any run) and `?` (one char) only.
bool glob_match(std::string_view pattern, std::string_view text);

}  // namespace icp::policy

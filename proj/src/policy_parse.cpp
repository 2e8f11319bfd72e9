#include <cctype>
#include <set>
#include <sstream>

#include "icp/crypto.hpp"
#include "icp/error.hpp"
#include "icp/policy.hpp"

namespace icp::policy {

namespace {

enum class Tok {
    kw_permit, kw_deny, kw_when, kw_and, kw_or, kw_not, kw_in, kw_matches,
    kw_true, kw_false,
    ident, string_lit, int_lit,
    lparen, rparen, lbracket, rbracket, comma, semicolon, dot,
    op_eq, op_ne, op_lt, op_le, op_gt, op_ge,
    end,
};

std::string_view tok_name(Tok t) {
    switch (t) {
        case Tok::kw_permit: return "'permit'";
        case Tok::kw_deny: return "'deny'";
        case Tok::kw_when: return "'when'";
        case Tok::kw_and: return "'and'";
        case Tok::kw_or: return "'or'";
        case Tok::kw_not: return "'not'";
        case Tok::kw_in: return "'in'";
        case Tok::kw_matches: return "'matches'";
        case Tok::kw_true: return "'true'";
        case Tok::kw_false: return "'false'";
        case Tok::ident: return "identifier";
        case Tok::string_lit: return "string";
        case Tok::int_lit: return "integer";
        case Tok::lparen: return "'('";
        case Tok::rparen: return "')'";
        case Tok::lbracket: return "'['";
        case Tok::rbracket: return "']'";
        case Tok::comma: return "','";
        case Tok::semicolon: return "';'";
        case Tok::dot: return "'.'";
        case Tok::op_eq: return "'=='";
        case Tok::op_ne: return "'!='";
        case Tok::op_lt: return "'<'";
        case Tok::op_le: return "'<='";
        case Tok::op_gt: return "'>'";
        case Tok::op_ge: return "'>='";
        case Tok::end: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::end;
    std::string text;       // ident / string contents
    std::int64_t number = 0;
    int line = 1;
    int column = 1;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_trivia();
        Token t;
        t.line = line_;
        t.column = column_;
        if (eof()) {
            t.kind = Tok::end;
            return t;
        }
        char c = peek();
        if (c == '"') {
            return lex_string(t);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            return lex_int(t);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return lex_word(t);
        }
        switch (c) {
            case '(': advance(); t.kind = Tok::lparen; return t;
            case ')': advance(); t.kind = Tok::rparen; return t;
            case '[': advance(); t.kind = Tok::lbracket; return t;
            case ']': advance(); t.kind = Tok::rbracket; return t;
            case ',': advance(); t.kind = Tok::comma; return t;
            case ';': advance(); t.kind = Tok::semicolon; return t;
            case '.': advance(); t.kind = Tok::dot; return t;
            case '=':
                advance();
                expect_char('=', t);
                t.kind = Tok::op_eq;
                return t;
            case '!':
                advance();
                expect_char('=', t);
                t.kind = Tok::op_ne;
                return t;
            case '<':
                advance();
                if (!eof() && peek() == '=') { advance(); t.kind = Tok::op_le; }
                else { t.kind = Tok::op_lt; }
                return t;
            case '>':
                advance();
                if (!eof() && peek() == '=') { advance(); t.kind = Tok::op_ge; }
                else { t.kind = Tok::op_gt; }
                return t;
            default:
                fail(t.line, t.column, std::string("unexpected character '") + c + "'");
        }
    }

    [[noreturn]] static void fail(int line, int column, const std::string& message) {
        std::ostringstream os;
        os << line << ":" << column << ": " << message;
        throw Error(ErrorCode::parse_error, os.str());
    }

  private:
    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void expect_char(char want, const Token& t) {
        if (eof() || peek() != want) {
            fail(t.line, t.column, std::string("expected '") + want + "' to follow");
        }
        advance();
    }

    void skip_trivia() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    Token lex_string(Token t) {
        advance();  // opening quote
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') {
                fail(t.line, t.column, "unterminated string literal");
            }
            char c = peek();
            advance();
            if (c == '"') {
                break;
            }
            if (c == '\\') {
                if (eof()) {
                    fail(t.line, t.column, "unterminated string literal");
                }
                char esc = peek();
                advance();
                if (esc == '"' || esc == '\\') {
                    out.push_back(esc);
                } else {
                    fail(t.line, t.column,
                         std::string("invalid escape '\\") + esc + "' (only \\\" and \\\\)");
                }
            } else {
                out.push_back(c);
            }
        }
        t.kind = Tok::string_lit;
        t.text = std::move(out);
        return t;
    }

    Token lex_int(Token t) {
        std::string digits;
        if (peek() == '-') {
            digits.push_back('-');
            advance();
        }
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
            digits.push_back(peek());
            advance();
        }
        try {
            t.number = std::stoll(digits);
        } catch (const std::exception&) {
            fail(t.line, t.column, "integer literal out of range");
        }
        t.kind = Tok::int_lit;
        t.text = std::move(digits);
        return t;
    }

    Token lex_word(Token t) {
        std::string word;
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                word.push_back(c);
                advance();
            } else {
                break;
            }
        }
        if (word == "permit") t.kind = Tok::kw_permit;
        else if (word == "deny") t.kind = Tok::kw_deny;
        else if (word == "when") t.kind = Tok::kw_when;
        else if (word == "and") t.kind = Tok::kw_and;
        else if (word == "or") t.kind = Tok::kw_or;
        else if (word == "not") t.kind = Tok::kw_not;
        else if (word == "in") t.kind = Tok::kw_in;
        else if (word == "matches") t.kind = Tok::kw_matches;
        else if (word == "true") t.kind = Tok::kw_true;
        else if (word == "false") t.kind = Tok::kw_false;
        else t.kind = Tok::ident;
        t.text = std::move(word);
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

class Parser {
  public:
    explicit Parser(std::string_view src) : lexer_(src) { shift(); }

    std::vector<Policy> parse_policies() {
        std::vector<Policy> out;
        while (cur_.kind != Tok::end) {
            out.push_back(parse_policy());
        }
        return out;
    }

  private:
    void shift() { cur_ = lexer_.next(); }

    [[noreturn]] void unexpected(const std::string& wanted) {
        Lexer::fail(cur_.line, cur_.column, "expected " + wanted + ", got " +
                                                std::string(tok_name(cur_.kind)));
    }

    Token expect(Tok kind, const std::string& wanted) {
        if (cur_.kind != kind) {
            unexpected(wanted);
        }
        Token t = cur_;
        shift();
        return t;
    }

    Policy parse_policy() {
        Policy p;
        if (cur_.kind == Tok::kw_permit) {
            p.effect = Effect::permit;
        } else if (cur_.kind == Tok::kw_deny) {
            p.effect = Effect::deny;
        } else {
            unexpected("'permit' or 'deny'");
        }
        shift();
        p.id = expect(Tok::ident, "policy identifier").text;
        expect(Tok::kw_when, "'when'");
        p.condition = parse_expr();
        expect(Tok::semicolon, "';'");
        return p;
    }

    ExprPtr parse_expr() {
        ExprPtr left = parse_and();
        while (cur_.kind == Tok::kw_or) {
            shift();
            auto node = std::make_shared<Expr>();
            node->type = Expr::Type::logical_or;
            node->lhs = std::move(left);
            node->rhs = parse_and();
            left = std::move(node);
        }
        return left;
    }

    ExprPtr parse_and() {
        ExprPtr left = parse_unary();
        while (cur_.kind == Tok::kw_and) {
            shift();
            auto node = std::make_shared<Expr>();
            node->type = Expr::Type::logical_and;
            node->lhs = std::move(left);
            node->rhs = parse_unary();
            left = std::move(node);
        }
        return left;
    }

    ExprPtr parse_unary() {
        if (cur_.kind == Tok::kw_not) {
            shift();
            auto node = std::make_shared<Expr>();
            node->type = Expr::Type::logical_not;
            node->child = parse_unary();
            return node;
        }
        return parse_atom();
    }

    ExprPtr parse_atom() {
        if (cur_.kind == Tok::lparen) {
            shift();
            ExprPtr inner = parse_expr();
            expect(Tok::rparen, "')'");
            return inner;
        }
        if (cur_.kind == Tok::kw_true || cur_.kind == Tok::kw_false) {
            auto node = std::make_shared<Expr>();
            node->type = Expr::Type::literal;
            node->literal = cur_.kind == Tok::kw_true;
            shift();
            return node;
        }
        auto node = std::make_shared<Expr>();
        node->type = Expr::Type::comparison;
        node->left = parse_operand();
        node->op = parse_cmp_op();
        node->right = parse_operand();
        return node;
    }

    CmpOp parse_cmp_op() {
        CmpOp op;
        switch (cur_.kind) {
            case Tok::op_eq: op = CmpOp::eq; break;
            case Tok::op_ne: op = CmpOp::ne; break;
            case Tok::op_lt: op = CmpOp::lt; break;
            case Tok::op_le: op = CmpOp::le; break;
            case Tok::op_gt: op = CmpOp::gt; break;
            case Tok::op_ge: op = CmpOp::ge; break;
            case Tok::kw_in: op = CmpOp::in_set; break;
            case Tok::kw_matches: op = CmpOp::matches; break;
            default: unexpected("comparison operator");
        }
        shift();
        return op;
    }

    Operand parse_operand() {
        Operand o;
        switch (cur_.kind) {
            case Tok::ident: {
                o.type = Operand::Type::attr;
                o.root = cur_.text;
                shift();
                while (cur_.kind == Tok::dot) {
                    shift();
                    o.path.push_back(expect(Tok::ident, "attribute segment").text);
                }
                return o;
            }
            case Tok::string_lit:
                o.type = Operand::Type::string;
                o.text = cur_.text;
                shift();
                return o;
            case Tok::int_lit:
                o.type = Operand::Type::integer;
                o.number = cur_.number;
                shift();
                return o;
            case Tok::lbracket: {
                shift();
                o.type = Operand::Type::set;
                if (cur_.kind != Tok::rbracket) {
                    o.items.push_back(expect(Tok::string_lit, "string").text);
                    while (cur_.kind == Tok::comma) {
                        shift();
                        o.items.push_back(expect(Tok::string_lit, "string").text);
                    }
                }
                expect(Tok::rbracket, "']'");
                return o;
            }
            default:
                unexpected("expression");
        }
    }

    Lexer lexer_;
    Token cur_;
};

void check_unique_ids(const std::vector<Policy>& policies) {
    std::set<std::string_view> seen;
    for (const auto& p : policies) {
        if (!seen.insert(p.id).second) {
            throw Error(ErrorCode::duplicate_policy_id,
                        "policy id '" + p.id + "' is declared more than once");
        }
    }
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void print_operand(std::ostringstream& os, const Operand& o) {
    switch (o.type) {
        case Operand::Type::attr:
            os << o.root;
            for (const auto& seg : o.path) {
                os << "." << seg;
            }
            break;
        case Operand::Type::string:
            os << quote(o.text);
            break;
        case Operand::Type::integer:
            os << o.number;
            break;
        case Operand::Type::set: {
            os << "[";
            for (std::size_t i = 0; i < o.items.size(); ++i) {
                if (i != 0) os << ", ";
                os << quote(o.items[i]);
            }
            os << "]";
            break;
        }
    }
}

// Precedence: or (lowest) < and < not < atom. Children are parenthesized
// whenever their precedence is lower than the containing operator's.
int precedence(const Expr& e) {
    switch (e.type) {
        case Expr::Type::logical_or: return 1;
        case Expr::Type::logical_and: return 2;
        case Expr::Type::logical_not: return 3;
        default: return 4;
    }
}

void print_expr(std::ostringstream& os, const Expr& e, int parent_prec) {
    int prec = precedence(e);
    bool parens = prec < parent_prec;
    if (parens) os << "(";
    switch (e.type) {
        case Expr::Type::literal:
            os << (e.literal ? "true" : "false");
            break;
        case Expr::Type::logical_not:
            os << "not ";
            print_expr(os, *e.child, precedence(e));
            break;
        case Expr::Type::logical_and:
            print_expr(os, *e.lhs, prec);
            os << " and ";
            print_expr(os, *e.rhs, prec + 1);  // right operand binds tighter: left-assoc
            break;
        case Expr::Type::logical_or:
            print_expr(os, *e.lhs, prec);
            os << " or ";
            print_expr(os, *e.rhs, prec + 1);
            break;
        case Expr::Type::comparison:
            print_operand(os, e.left);
            os << " " << to_string(e.op) << " ";
            print_operand(os, e.right);
            break;
    }
    if (parens) os << ")";
}

}  // namespace

std::string_view to_string(Effect e) {
    return e == Effect::permit ? "permit" : "deny";
}

std::string_view to_string(Outcome o) {
    return o == Outcome::permit ? "permit" : "deny";
}

Outcome outcome_from_string(std::string_view text) {
    if (text == "permit") return Outcome::permit;
    if (text == "deny") return Outcome::deny;
    throw Error(ErrorCode::malformed_request, "unknown outcome '" + std::string(text) + "'");
}

std::string_view to_string(CmpOp op) {
    switch (op) {
        case CmpOp::eq: return "==";
        case CmpOp::ne: return "!=";
        case CmpOp::lt: return "<";
        case CmpOp::le: return "<=";
        case CmpOp::gt: return ">";
        case CmpOp::ge: return ">=";
        case CmpOp::in_set: return "in";
        case CmpOp::matches: return "matches";
    }
    return "==";
}

PolicySet parse_policy_set(std::string_view source) {
    Parser parser(source);
    PolicySet set;
    set.policies = parser.parse_policies();
    check_unique_ids(set.policies);
    set.source = std::string(source);
    set.version = crypto::sha256_hex(set.source);
    return set;
}

PolicySet parse_policy_files(
    const std::vector<std::pair<std::string, std::string>>& named_sources) {
    PolicySet set;
    std::string combined;
    for (const auto& [name, text] : named_sources) {
        try {
            Parser parser(text);
            auto policies = parser.parse_policies();
            set.policies.insert(set.policies.end(), policies.begin(), policies.end());
        } catch (const Error& e) {
            throw Error(e.code(), name + ":" + e.message());
        }
        combined += text;
        if (combined.empty() || combined.back() != '\n') {
            combined.push_back('\n');
        }
    }
    check_unique_ids(set.policies);
    set.source = std::move(combined);
    set.version = crypto::sha256_hex(set.source);
    return set;
}

std::string pretty_print(const Expr& expr) {
    std::ostringstream os;
    print_expr(os, expr, 0);
    return os.str();
}

std::string pretty_print(const PolicySet& set) {
    std::ostringstream os;
    for (const auto& p : set.policies) {
        os << to_string(p.effect) << " " << p.id << " when " << pretty_print(*p.condition)
           << ";\n";
    }
    return os.str();
}

}  // namespace icp::policy

#include "hibarrier/expr.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hibarrier::expr {

namespace {

Ast make(Node n) { return std::make_shared<const Node>(std::move(n)); }

const Literal* as_literal(const Ast& a) { return std::get_if<Literal>(&a->kind); }

bool is_value(const Ast& a, double v) {
    const auto* lit = as_literal(a);
    return lit != nullptr && lit->value == v;
}

bool has_free_symbols(const Ast& a) {
    return std::visit(
        [](const auto& k) -> bool {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Variable> || std::is_same_v<T, Parameter>) {
                return true;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return has_free_symbols(k.arg);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return has_free_symbols(k.lhs) || has_free_symbols(k.rhs);
            } else {
                return false;
            }
        },
        a->kind);
}

double apply(UnaryOp op, double a) {
    switch (op) {
        case UnaryOp::Neg: return -a;
        case UnaryOp::Abs: return std::fabs(a);
        case UnaryOp::Sqrt: return std::sqrt(a);
        case UnaryOp::Exp: return std::exp(a);
        case UnaryOp::Log: return std::log(a);
        case UnaryOp::Sgn: return a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
    }
    return a;
}

double apply(BinaryOp op, double a, double b) {
    switch (op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return a / b;
        case BinaryOp::Pow: return std::pow(a, b);
        case BinaryOp::Min: return std::min(a, b);
        case BinaryOp::Max: return std::max(a, b);
    }
    return a;
}

// ---------------------------------------------------------------- lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End, Bad };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string_view text;
    double number = 0.0;
};

std::string describe(Tok t) {
    switch (t) {
        case Tok::Number: return "number";
        case Tok::Ident: return "identifier";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::End: return "end of input";
        case Tok::Bad: return "invalid character";
    }
    return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (true) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i >= s.size()) {
            out.push_back({Tok::End, s.size(), {}});
            return out;
        }
        const char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
            const std::size_t len = static_cast<std::size_t>(ptr - (s.data() + i));
            if (ec != std::errc() || len == 0) {
                out.push_back({Tok::Bad, i, s.substr(i, 1)});
                return out;
            }
            out.push_back({Tok::Number, i, s.substr(i, len), v});
            i += len;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            out.push_back({Tok::Ident, i, s.substr(i, j - i)});
            i = j;
            continue;
        }
        Tok k = Tok::Bad;
        switch (c) {
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case ',': k = Tok::Comma; break;
            default: break;
        }
        out.push_back({k, i, s.substr(i, 1)});
        if (k == Tok::Bad) return out;
        ++i;
    }
}

// ---------------------------------------------------------------- parser

struct ParseFailure {
    Diagnostic diag;
};

class Parser {
public:
    Parser(std::string_view text, int n_vars, int n_params, const Constants& constants)
        : text_(text), toks_(lex(text)), n_vars_(n_vars), n_params_(n_params), constants_(constants) {}

    Ast run() {
        Ast e = expression();
        if (peek().kind != Tok::End) fail("unexpected " + describe(peek().kind), {"operator", "end of input"});
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const { fail_at(peek().offset, msg, std::move(expected)); }

    [[noreturn]] void fail_at(std::size_t offset, const std::string& msg, std::vector<std::string> expected) const {
        Diagnostic d;
        d.offset = offset;
        d.message = msg;
        d.expected = std::move(expected);
        for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++d.line;
                d.column = 1;
            } else {
                ++d.column;
            }
        }
        throw ParseFailure{std::move(d)};
    }

    void expect(Tok k) {
        if (peek().kind != k) fail("expected " + describe(k) + ", found " + describe(peek().kind), {describe(k)});
        next();
    }

    Ast expression() {
        Ast lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const BinaryOp op = next().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
            lhs = make(Node{Binary{op, lhs, term()}});
        }
        return lhs;
    }

    Ast term() {
        Ast lhs = signed_factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const BinaryOp op = next().kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
            lhs = make(Node{Binary{op, lhs, signed_factor()}});
        }
        return lhs;
    }

    Ast signed_factor() {
        if (peek().kind == Tok::Minus) {
            next();
            return make(Node{Unary{UnaryOp::Neg, signed_factor()}});
        }
        return power();
    }

    Ast power() {
        Ast base = primary();
        if (peek().kind != Tok::Caret) return base;
        next();
        const std::size_t at = peek().offset;
        Ast exponent = exponent_expr();
        if (has_free_symbols(exponent)) fail_at(at, "exponent must be a numeric constant", {"number"});
        const double v = eval(exponent, {}, {});
        return make(Node{Binary{BinaryOp::Pow, base, make(Node{Literal{v}})}});
    }

    Ast exponent_expr() {
        if (peek().kind == Tok::Minus) {
            next();
            return make(Node{Unary{UnaryOp::Neg, exponent_expr()}});
        }
        return power();
    }

    Ast primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number:
                next();
                return make(Node{Literal{t.number}});
            case Tok::LParen: {
                next();
                Ast e = expression();
                expect(Tok::RParen);
                return e;
            }
            case Tok::Ident:
                return identifier();
            default:
                fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected " + describe(t.kind),
                     {"number", "identifier", "'('", "'-'"});
        }
    }

    Ast identifier() {
        const Token t = next();
        const std::string_view name = t.text;
        static const std::map<std::string_view, UnaryOp> unary_fns = {
            {"abs", UnaryOp::Abs}, {"sqrt", UnaryOp::Sqrt}, {"exp", UnaryOp::Exp}, {"log", UnaryOp::Log}, {"sgn", UnaryOp::Sgn}};
        static const std::map<std::string_view, BinaryOp> binary_fns = {{"min", BinaryOp::Min}, {"max", BinaryOp::Max}};

        if (auto it = unary_fns.find(name); it != unary_fns.end()) {
            expect(Tok::LParen);
            Ast a = expression();
            expect(Tok::RParen);
            return make(Node{Unary{it->second, a}});
        }
        if (auto it = binary_fns.find(name); it != binary_fns.end()) {
            expect(Tok::LParen);
            Ast a = expression();
            expect(Tok::Comma);
            Ast b = expression();
            expect(Tok::RParen);
            return make(Node{Binary{it->second, a, b}});
        }
        if (auto it = constants_.find(name); it != constants_.end()) {
            return make(Node{Constant{std::string(name), it->second}});
        }
        if (name.size() > 1 && (name[0] == 'x' || name[0] == 'p')) {
            int idx = 0;
            auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
            if (ec == std::errc() && ptr == name.data() + name.size()) {
                const bool is_var = name[0] == 'x';
                const int limit = is_var ? n_vars_ : n_params_;
                if (idx < 1 || idx > limit) {
                    fail_at(t.offset, std::string(is_var ? "variable" : "parameter") + " index out of range: " + std::string(name),
                            {is_var ? "x1..x" + std::to_string(n_vars_) : "p1..p" + std::to_string(n_params_)});
                }
                return is_var ? make(Node{Variable{idx}}) : make(Node{Parameter{idx}});
            }
        }
        fail_at(t.offset, "unknown identifier '" + std::string(name) + "'", {"variable", "parameter", "constant", "function"});
    }

    std::string_view text_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int n_vars_;
    int n_params_;
    const Constants& constants_;
};

// ---------------------------------------------------------------- printing

int precedence(const Ast& a) {
    return std::visit(
        [](const auto& k) -> int {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Binary>) {
                switch (k.op) {
                    case BinaryOp::Add:
                    case BinaryOp::Sub: return 1;
                    case BinaryOp::Mul:
                    case BinaryOp::Div: return 2;
                    case BinaryOp::Pow: return 4;
                    default: return 5;
                }
            } else if constexpr (std::is_same_v<T, Unary>) {
                return k.op == UnaryOp::Neg ? 3 : 5;
            } else if constexpr (std::is_same_v<T, Literal>) {
                return k.value < 0 ? 3 : 5;
            } else {
                return 5;
            }
        },
        a->kind);
}

std::string number_text(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string wrap(const Ast& a, bool paren) {
    std::string s = to_string(a);
    return paren ? "(" + s + ")" : s;
}

const char* unary_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::Abs: return "abs";
        case UnaryOp::Sqrt: return "sqrt";
        case UnaryOp::Exp: return "exp";
        case UnaryOp::Log: return "log";
        case UnaryOp::Sgn: return "sgn";
        case UnaryOp::Neg: return "-";
    }
    return "?";
}

}  // namespace

std::string Diagnostic::to_string() const {
    std::ostringstream os;
    os << line << ':' << column << " (offset " << offset << "): " << message;
    if (!expected.empty()) {
        os << "; expected one of:";
        for (const auto& e : expected) os << ' ' << e;
    }
    return os.str();
}

ParseResult parse(std::string_view text, int n_vars, int n_params, const Constants& constants) {
    try {
        Parser p(text, n_vars, n_params, constants);
        return p.run();
    } catch (ParseFailure& f) {
        return std::move(f.diag);
    }
}

Ast parse_or_throw(std::string_view text, int n_vars, int n_params, const Constants& constants) {
    auto r = parse(text, n_vars, n_params, constants);
    if (auto* d = std::get_if<Diagnostic>(&r)) {
        throw std::invalid_argument("in '" + std::string(text) + "' at " + d->to_string());
    }
    return std::get<Ast>(r);
}

double eval(const Ast& ast, std::span<const double> x, std::span<const double> p) {
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Literal>) {
                return k.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return x[static_cast<std::size_t>(k.index - 1)];
            } else if constexpr (std::is_same_v<T, Parameter>) {
                return p[static_cast<std::size_t>(k.index - 1)];
            } else if constexpr (std::is_same_v<T, Constant>) {
                return k.value;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return apply(k.op, eval(k.arg, x, p));
            } else {
                return apply(k.op, eval(k.lhs, x, p), eval(k.rhs, x, p));
            }
        },
        ast->kind);
}

Ast literal(double v) { return make(Node{Literal{v}}); }
Ast variable(int index) { return make(Node{Variable{index}}); }
Ast parameter(int index) { return make(Node{Parameter{index}}); }

Ast unary(UnaryOp op, Ast arg) {
    if (const auto* lit = as_literal(arg)) return literal(apply(op, lit->value));
    if (op == UnaryOp::Neg) {
        if (const auto* u = std::get_if<Unary>(&arg->kind); u && u->op == UnaryOp::Neg) return u->arg;
    }
    return make(Node{Unary{op, std::move(arg)}});
}

Ast binary(BinaryOp op, Ast lhs, Ast rhs) {
    const auto* a = as_literal(lhs);
    const auto* b = as_literal(rhs);
    if (a && b) return literal(apply(op, a->value, b->value));
    switch (op) {
        case BinaryOp::Add:
            if (is_value(lhs, 0)) return rhs;
            if (is_value(rhs, 0)) return lhs;
            break;
        case BinaryOp::Sub:
            if (is_value(rhs, 0)) return lhs;
            if (is_value(lhs, 0)) return unary(UnaryOp::Neg, rhs);
            break;
        case BinaryOp::Mul:
            if (is_value(lhs, 0) || is_value(rhs, 0)) return literal(0.0);
            if (is_value(lhs, 1)) return rhs;
            if (is_value(rhs, 1)) return lhs;
            break;
        case BinaryOp::Div:
            if (is_value(lhs, 0)) return literal(0.0);
            if (is_value(rhs, 1)) return lhs;
            break;
        case BinaryOp::Pow:
            if (is_value(rhs, 1)) return lhs;
            if (is_value(rhs, 0)) return literal(1.0);
            break;
        default: break;
    }
    return make(Node{Binary{op, std::move(lhs), std::move(rhs)}});
}

bool depends_on_variable(const Ast& ast, int var_index) {
    return std::visit(
        [&](const auto& k) -> bool {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Variable>) {
                return k.index == var_index;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return depends_on_variable(k.arg, var_index);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return depends_on_variable(k.lhs, var_index) || depends_on_variable(k.rhs, var_index);
            } else {
                return false;
            }
        },
        ast->kind);
}

namespace {

struct NonSmoothSignal {
    std::string reason;
};

Ast d(const Ast& a, int v) {
    if (!depends_on_variable(a, v)) return literal(0.0);
    return std::visit(
        [&](const auto& k) -> Ast {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Variable>) {
                return literal(1.0);
            } else if constexpr (std::is_same_v<T, Unary>) {
                const Ast du = d(k.arg, v);
                switch (k.op) {
                    case UnaryOp::Neg: return unary(UnaryOp::Neg, du);
                    case UnaryOp::Sqrt:
                        return binary(BinaryOp::Div, du, binary(BinaryOp::Mul, literal(2.0), unary(UnaryOp::Sqrt, k.arg)));
                    case UnaryOp::Exp: return binary(BinaryOp::Mul, du, unary(UnaryOp::Exp, k.arg));
                    case UnaryOp::Log: return binary(BinaryOp::Div, du, k.arg);
                    default: throw NonSmoothSignal{std::string(unary_name(k.op)) + " on the derivative path"};
                }
            } else if constexpr (std::is_same_v<T, Binary>) {
                switch (k.op) {
                    case BinaryOp::Add: return binary(BinaryOp::Add, d(k.lhs, v), d(k.rhs, v));
                    case BinaryOp::Sub: return binary(BinaryOp::Sub, d(k.lhs, v), d(k.rhs, v));
                    case BinaryOp::Mul:
                        return binary(BinaryOp::Add, binary(BinaryOp::Mul, d(k.lhs, v), k.rhs), binary(BinaryOp::Mul, k.lhs, d(k.rhs, v)));
                    case BinaryOp::Div:
                        return binary(BinaryOp::Div,
                                      binary(BinaryOp::Sub, binary(BinaryOp::Mul, d(k.lhs, v), k.rhs), binary(BinaryOp::Mul, k.lhs, d(k.rhs, v))),
                                      binary(BinaryOp::Pow, k.rhs, literal(2.0)));
                    case BinaryOp::Pow: {
                        const double e = std::get<Literal>(k.rhs->kind).value;
                        return binary(BinaryOp::Mul, binary(BinaryOp::Mul, literal(e), binary(BinaryOp::Pow, k.lhs, literal(e - 1.0))), d(k.lhs, v));
                    }
                    case BinaryOp::Min: throw NonSmoothSignal{"min on the derivative path"};
                    case BinaryOp::Max: throw NonSmoothSignal{"max on the derivative path"};
                }
                return literal(0.0);
            } else {
                return literal(0.0);
            }
        },
        a->kind);
}

}  // namespace

DiffResult diff(const Ast& ast, int var_index) {
    try {
        return d(ast, var_index);
    } catch (NonSmoothSignal& s) {
        return NonSmoothMarker{std::move(s.reason)};
    }
}

std::string to_string(const Ast& ast) {
    return std::visit(
        [&](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Literal>) {
                return k.value < 0 ? "(" + number_text(k.value) + ")" : number_text(k.value);
            } else if constexpr (std::is_same_v<T, Variable>) {
                return "x" + std::to_string(k.index);
            } else if constexpr (std::is_same_v<T, Parameter>) {
                return "p" + std::to_string(k.index);
            } else if constexpr (std::is_same_v<T, Constant>) {
                return k.name;
            } else if constexpr (std::is_same_v<T, Unary>) {
                if (k.op == UnaryOp::Neg) return "-" + wrap(k.arg, precedence(k.arg) < 3);
                return std::string(unary_name(k.op)) + "(" + to_string(k.arg) + ")";
            } else {
                const int p = precedence(ast);
                switch (k.op) {
                    case BinaryOp::Min: return "min(" + to_string(k.lhs) + ", " + to_string(k.rhs) + ")";
                    case BinaryOp::Max: return "max(" + to_string(k.lhs) + ", " + to_string(k.rhs) + ")";
                    case BinaryOp::Pow: return wrap(k.lhs, precedence(k.lhs) <= p) + "^" + wrap(k.rhs, true);
                    default: break;
                }
                const char* sym = k.op == BinaryOp::Add ? " + " : k.op == BinaryOp::Sub ? " - " : k.op == BinaryOp::Mul ? "*" : "/";
                // Left-associative: the right operand needs parentheses at equal precedence.
                return wrap(k.lhs, precedence(k.lhs) < p) + sym + wrap(k.rhs, precedence(k.rhs) <= p);
            }
        },
        ast->kind);
}

bool structurally_equal(const Ast& a, const Ast& b) {
    if (a->kind.index() != b->kind.index()) return false;
    return std::visit(
        [&](const auto& ka) -> bool {
            using T = std::decay_t<decltype(ka)>;
            const auto& kb = std::get<T>(b->kind);
            if constexpr (std::is_same_v<T, Literal>) {
                return ka.value == kb.value;
            } else if constexpr (std::is_same_v<T, Variable> || std::is_same_v<T, Parameter>) {
                return ka.index == kb.index;
            } else if constexpr (std::is_same_v<T, Constant>) {
                return ka.name == kb.name && ka.value == kb.value;
            } else if constexpr (std::is_same_v<T, Unary>) {
                return ka.op == kb.op && structurally_equal(ka.arg, kb.arg);
            } else {
                return ka.op == kb.op && structurally_equal(ka.lhs, kb.lhs) && structurally_equal(ka.rhs, kb.rhs);
            }
        },
        a->kind);
}

}  // namespace hibarrier::expr

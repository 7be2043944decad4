#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hibarrier::expr {

enum class UnaryOp { Neg, Abs, Sqrt, Exp, Log, Sgn };
enum class BinaryOp { Add, Sub, Mul, Div, Pow, Min, Max };

struct Node;
using Ast = std::shared_ptr<const Node>;

struct Literal {
    double value;
};
struct Variable {
    int index;  // 1-based
};
struct Parameter {
    int index;  // 1-based
};
struct Constant {
    std::string name;
    double value;
};
struct Unary {
    UnaryOp op;
    Ast arg;
};
struct Binary {
    BinaryOp op;
    Ast lhs;
    Ast rhs;
};

struct Node {
    std::variant<Literal, Variable, Parameter, Constant, Unary, Binary> kind;
};

struct Diagnostic {
    std::size_t offset = 0;  // byte offset into the input
    int line = 1;
    int column = 1;
    std::string message;
    std::vector<std::string> expected;

    std::string to_string() const;
};

using Constants = std::map<std::string, double, std::less<>>;
using ParseResult = std::variant<Ast, Diagnostic>;

ParseResult parse(std::string_view text, int n_vars, int n_params, const Constants& constants = {});

// Throws std::invalid_argument with the diagnostic text on failure.
Ast parse_or_throw(std::string_view text, int n_vars, int n_params, const Constants& constants = {});

double eval(const Ast& ast, std::span<const double> x, std::span<const double> p = {});

struct NonSmoothMarker {
    std::string reason;
};
using DiffResult = std::variant<Ast, NonSmoothMarker>;

// d(ast)/d(x_var_index), var_index 1-based.
DiffResult diff(const Ast& ast, int var_index);

std::string to_string(const Ast& ast);
bool structurally_equal(const Ast& a, const Ast& b);
bool depends_on_variable(const Ast& ast, int var_index);

// Node builders with light constant folding.
Ast literal(double v);
Ast variable(int index);
Ast parameter(int index);
Ast unary(UnaryOp op, Ast arg);
Ast binary(BinaryOp op, Ast lhs, Ast rhs);

}  // namespace hibarrier::expr

#pragma once

// A small language for generalized-function experiments:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ['^' int] ["'"]*
//   atom   := 'H' | 'D' | 'x' | number | '(' expr ')'
//           | 'int' '(' expr ')' | 'pair' '(' expr ',' int ')'
//
// H and D are the embedded Heaviside and delta, int(...) integrates over R,
// pair(e, k) pairs with probe k of the test suite. Whitespace is ignored.
// A '-' directly in front of a number literal at atom position makes a
// negative literal.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "genfn/asymptotics.hpp"
#include "genfn/embedding.hpp"
#include "genfn/errors.hpp"

namespace genfn::expr {

/// Byte range [begin, end) in the source text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
};

enum class Kind { heaviside, delta, variable, constant, add, sub, mul, pow, prime, integral, pair };

struct Expr {
    Kind kind = Kind::constant;
    double number = 0.0;  // constant
    int integer = 0;      // pow exponent, pair probe index
    std::vector<Expr> args;
    Span span;
};

/// Same tree shape and payloads; spans are ignored.
bool structurally_equal(const Expr& a, const Expr& b);

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset, std::vector<std::string> expected);
    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Type errors and evaluation failures, tagged with the offending node's span.
class ExprError : public Error {
public:
    ExprError(const std::string& message, Span span);
    Span span() const { return span_; }

private:
    Span span_;
};

enum class ValueType { function, number, scalar };
std::string to_string(ValueType t);

/// Throws ParseError or ExprError (ill-typed tree).
Expr parse(const std::string& text);
ValueType type_of(const Expr& e);

/// Canonical text; parse(to_string(e)) is structurally equal to e.
std::string to_string(const Expr& e);

struct EvalContext {
    Mollifier mollifier;
    EpsilonGrid grid;
    std::vector<TestFunction> suite;
    double tol = kIdentityTol;
    Thresholds thresholds;
};

struct NumberRow {
    double eps;
    double value;
    double error_estimate;
};

struct FunctionRow {
    double eps;
    double x;
    double value;
};

struct EvalReport {
    std::string expression;
    ValueType type = ValueType::number;
    std::vector<NumberRow> numbers;
    std::optional<AsymptoticClass> classification;
    std::vector<FunctionRow> functions;
};

/// Number-valued trees give the eps table and its classification;
/// function-valued ones give representatives sampled on x = eps * y,
/// y in [-1.5 R, 1.5 R].
EvalReport evaluate(const Expr& e, const EvalContext& ctx);

/// Function-valued subtree as a GenFunction (scalars become constants).
GenFunction to_gen_function(const Expr& e, const Mollifier& m);

}  // namespace genfn::expr

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "travwave/errors.hpp"

namespace travwave {

/// A parsed arithmetic expression in the single variable `t`.
///
/// Grammar: numbers, `t`, unary minus, `abs/sqrt/exp/ln`, binary `+ - * / ^`
/// and `pow(a,b)`. `^` is right-associative and binds tighter than unary
/// minus, so `-t^2` is `-(t^2)` and `2^-3` works. Evaluation is pure and
/// rejects every non-finite intermediate as a domain error.
class Expression {
public:
    Expression() = default;

    /// Parses `src`; throws SyntaxError (with byte offset) on malformed input
    /// or unknown identifiers.
    static Expression parse(std::string_view src);

    /// Evaluates at `t`; throws EvalDomainError if any operation leaves the
    /// finite reals.
    double eval(double t) const;

    /// Pretty-prints with minimal parentheses; parse(str()) is
    /// evaluation-equivalent to the original.
    std::string str() const;

    bool empty() const { return nodes_.empty(); }

private:
    enum class Op : std::uint8_t {
        Const, Var,
        Neg, Abs, Sqrt, Exp, Ln,
        Add, Sub, Mul, Div, Pow,
    };
    struct Node {
        Op op;
        std::int32_t a = -1;
        std::int32_t b = -1;
        double value = 0.0;
    };

    double evalNode(std::int32_t idx, double t) const;
    void printNode(std::int32_t idx, std::string& out) const;
    static int precedence(Op op);

    std::vector<Node> nodes_;
    std::int32_t root_ = -1;

    friend class ExprParser;
};

} // namespace travwave

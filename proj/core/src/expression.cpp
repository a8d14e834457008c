#include "travwave/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace travwave {

namespace {

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

} // namespace

class ExprParser {
public:
    explicit ExprParser(std::string_view src) : src_(src) {}

    Expression run() {
        Expression e;
        nodes_ = &e.nodes_;
        e.root_ = parseExpr();
        skipWs();
        if (pos_ != src_.size())
            throw SyntaxError("unexpected trailing input", pos_);
        if (e.root_ < 0)
            throw SyntaxError("empty expression", 0);
        return e;
    }

private:
    using Op = Expression::Op;

    std::int32_t add(Op op, std::int32_t a = -1, std::int32_t b = -1, double v = 0.0) {
        nodes_->push_back({op, a, b, v});
        return static_cast<std::int32_t>(nodes_->size() - 1);
    }

    void skipWs() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skipWs();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw SyntaxError(std::string("expected '") + c + "' " + what, pos_);
    }

    char peek() {
        skipWs();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    // expr := term (('+'|'-') term)*
    std::int32_t parseExpr() {
        std::int32_t lhs = parseTerm();
        for (;;) {
            if (accept('+')) lhs = add(Op::Add, lhs, parseTerm());
            else if (accept('-')) lhs = add(Op::Sub, lhs, parseTerm());
            else return lhs;
        }
    }

    // term := factor (('*'|'/') factor)*
    std::int32_t parseTerm() {
        std::int32_t lhs = parseFactor();
        for (;;) {
            if (accept('*')) lhs = add(Op::Mul, lhs, parseFactor());
            else if (accept('/')) lhs = add(Op::Div, lhs, parseFactor());
            else return lhs;
        }
    }

    // factor := '-' factor | power     (unary minus below '^', above '*')
    std::int32_t parseFactor() {
        if (accept('-')) return add(Op::Neg, parseFactor());
        return parsePower();
    }

    // power := atom ('^' factor)?      (right-associative)
    std::int32_t parsePower() {
        std::int32_t base = parseAtom();
        if (accept('^')) return add(Op::Pow, base, parseFactor());
        return base;
    }

    std::int32_t parseAtom() {
        skipWs();
        if (pos_ >= src_.size()) throw SyntaxError("unexpected end of input", pos_);
        char c = src_[pos_];

        if (c == '(') {
            ++pos_;
            std::int32_t inner = parseExpr();
            expect(')', "to close parenthesis");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parseNumber();
        if (isIdentStart(c)) return parseIdent();
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    std::int32_t parseNumber() {
        const char* begin = src_.data() + pos_;
        const char* end = src_.data() + src_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr == begin)
            throw SyntaxError("malformed number", pos_);
        pos_ = static_cast<std::size_t>(ptr - src_.data());
        return add(Op::Const, -1, -1, value);
    }

    std::int32_t parseIdent() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && isIdentChar(src_[pos_])) ++pos_;
        std::string_view name = src_.substr(start, pos_ - start);

        if (name == "t") return add(Op::Var);

        Op op;
        bool twoArgs = false;
        if (name == "abs") op = Op::Abs;
        else if (name == "sqrt") op = Op::Sqrt;
        else if (name == "exp") op = Op::Exp;
        else if (name == "ln") op = Op::Ln;
        else if (name == "pow") { op = Op::Pow; twoArgs = true; }
        else throw SyntaxError("unknown identifier '" + std::string(name) + "'", start);

        expect('(', "after function name");
        std::int32_t a = parseExpr();
        std::int32_t b = -1;
        if (twoArgs) {
            expect(',', "between pow arguments");
            b = parseExpr();
        }
        expect(')', "to close argument list");
        return add(op, a, b);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::vector<Expression::Node>* nodes_ = nullptr;
};

Expression Expression::parse(std::string_view src) {
    std::size_t i = 0;
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    if (i == src.size()) throw SyntaxError("empty expression", 0);
    return ExprParser(src).run();
}

double Expression::eval(double t) const {
    if (root_ < 0) throw EvalDomainError("evaluating empty expression", t);
    return evalNode(root_, t);
}

double Expression::evalNode(std::int32_t idx, double t) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    double r;
    switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var:   return t;
    case Op::Neg:   r = -evalNode(n.a, t); break;
    case Op::Abs:   r = std::fabs(evalNode(n.a, t)); break;
    case Op::Sqrt: {
        double a = evalNode(n.a, t);
        if (a < 0.0) throw EvalDomainError("sqrt of negative value", t);
        r = std::sqrt(a);
        break;
    }
    case Op::Exp:   r = std::exp(evalNode(n.a, t)); break;
    case Op::Ln: {
        double a = evalNode(n.a, t);
        if (a <= 0.0) throw EvalDomainError("ln of nonpositive value", t);
        r = std::log(a);
        break;
    }
    case Op::Add:   r = evalNode(n.a, t) + evalNode(n.b, t); break;
    case Op::Sub:   r = evalNode(n.a, t) - evalNode(n.b, t); break;
    case Op::Mul:   r = evalNode(n.a, t) * evalNode(n.b, t); break;
    case Op::Div: {
        double den = evalNode(n.b, t);
        if (den == 0.0) throw EvalDomainError("division by zero", t);
        r = evalNode(n.a, t) / den;
        break;
    }
    case Op::Pow: {
        double base = evalNode(n.a, t);
        double expo = evalNode(n.b, t);
        if (base < 0.0 && expo != std::floor(expo))
            throw EvalDomainError("fractional power of negative base", t);
        if (base == 0.0 && expo < 0.0)
            throw EvalDomainError("zero raised to negative power", t);
        r = std::pow(base, expo);
        break;
    }
    default: throw EvalDomainError("corrupt expression node", t);
    }
    if (!std::isfinite(r)) throw EvalDomainError("non-finite value in evaluation", t);
    return r;
}

int Expression::precedence(Op op) {
    switch (op) {
    case Op::Add: case Op::Sub: return 1;
    case Op::Mul: case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
    }
}

void Expression::printNode(std::int32_t idx, std::string& out) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    auto child = [&](std::int32_t c, int minPrec) {
        bool paren = precedence(nodes_[static_cast<std::size_t>(c)].op) < minPrec;
        if (paren) out += '(';
        printNode(c, out);
        if (paren) out += ')';
    };
    switch (n.op) {
    case Op::Const: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        out += buf;
        break;
    }
    case Op::Var: out += 't'; break;
    case Op::Neg: out += '-'; child(n.a, 3); break;
    case Op::Abs: out += "abs("; printNode(n.a, out); out += ')'; break;
    case Op::Sqrt: out += "sqrt("; printNode(n.a, out); out += ')'; break;
    case Op::Exp: out += "exp("; printNode(n.a, out); out += ')'; break;
    case Op::Ln: out += "ln("; printNode(n.a, out); out += ')'; break;
    case Op::Add: child(n.a, 1); out += '+'; child(n.b, 2); break;
    case Op::Sub: child(n.a, 1); out += '-'; child(n.b, 2); break;
    case Op::Mul: child(n.a, 2); out += '*'; child(n.b, 3); break;
    case Op::Div: child(n.a, 2); out += '/'; child(n.b, 3); break;
    case Op::Pow: child(n.a, 5); out += '^'; child(n.b, 5); break;
    default: break;
    }
}

std::string Expression::str() const {
    std::string out;
    if (root_ >= 0) printNode(root_, out);
    return out;
}

} // namespace travwave

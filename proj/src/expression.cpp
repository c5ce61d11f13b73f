#include "madelung/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "madelung/error.hpp"

namespace madelung {

namespace {

struct Token {
    enum class Kind : std::uint8_t { number, ident, op, lparen, rparen, comma, end };
    Kind kind;
    double number = 0.0;
    std::string ident;
    char op = 0;
    std::size_t pos = 0;  // 1-based character position
};

[[noreturn]] void parse_fail(std::size_t pos, const std::string& what) {
    std::ostringstream os;
    os << "expression: " << what << " at position " << pos;
    fail(ErrorKind::parse, os.str());
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        const std::size_t pos = i + 1;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text.c_str() + i;
            char* end = nullptr;
            const double v = std::strtod(start, &end);
            if (end == start) parse_fail(pos, "malformed number");
            out.push_back({Token::Kind::number, v, {}, 0, pos});
            i += static_cast<std::size_t>(end - start);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            out.push_back({Token::Kind::ident, 0.0, text.substr(i, j - i), 0, pos});
            i = j;
            continue;
        }
        switch (c) {
            case '+':
            case '-':
            case '*':
            case '/':
            case '^':
                out.push_back({Token::Kind::op, 0.0, {}, c, pos});
                break;
            case '(':
                out.push_back({Token::Kind::lparen, 0.0, {}, c, pos});
                break;
            case ')':
                out.push_back({Token::Kind::rparen, 0.0, {}, c, pos});
                break;
            case ',':
                out.push_back({Token::Kind::comma, 0.0, {}, c, pos});
                break;
            default:
                parse_fail(pos, std::string("unexpected character '") + c + "'");
        }
        ++i;
    }
    out.push_back({Token::Kind::end, 0.0, {}, 0, text.size() + 1});
    return out;
}

}  // namespace

class ExpressionParser {
  public:
    ExpressionParser(const std::string& text, const Grid& grid) : tokens_(tokenize(text)) {
        for (int a = 0; a < grid.dim(); ++a) vars_["x" + std::to_string(a)] = a;
        if (grid.role(0) == AxisRole::time) vars_["t"] = 0;
        static const char* kSpatial[] = {"x", "y", "z"};
        int next = 0;
        for (int a = 0; a < grid.dim() && next < 3; ++a)
            if (grid.role(a) == AxisRole::space) vars_[kSpatial[next++]] = a;
    }

    std::vector<Expression::Op> run() {
        parse_expr();
        const Token& t = peek();
        if (t.kind != Token::Kind::end) parse_fail(t.pos, "unexpected trailing input");
        // The nesting cap keeps the operand stack bounded; verify the exact
        // depth so eval can use a fixed-size stack without checks.
        int depth = 0, peak = 0;
        for (const Op& op : program_) {
            switch (op.kind) {
                case Op::Kind::push_const:
                case Op::Kind::push_var:
                    peak = std::max(peak, ++depth);
                    break;
                case Op::Kind::add:
                case Op::Kind::sub:
                case Op::Kind::mul:
                case Op::Kind::div:
                case Op::Kind::pow:
                    --depth;
                    break;
                default:
                    break;
            }
        }
        if (peak > 255) parse_fail(1, "expression operand stack too deep");
        return std::move(program_);
    }

  private:
    using Op = Expression::Op;

    const Token& peek() const { return tokens_[cursor_]; }
    const Token& take() { return tokens_[cursor_++]; }

    void emit(Op::Kind k, double v = 0.0, int axis = 0) { program_.push_back({k, v, axis}); }

    void parse_expr() {
        parse_term();
        while (peek().kind == Token::Kind::op && (peek().op == '+' || peek().op == '-')) {
            const char op = take().op;
            parse_term();
            emit(op == '+' ? Op::Kind::add : Op::Kind::sub);
        }
    }

    void parse_term() {
        parse_power();
        while (peek().kind == Token::Kind::op && (peek().op == '*' || peek().op == '/')) {
            const char op = take().op;
            parse_power();
            emit(op == '*' ? Op::Kind::mul : Op::Kind::div);
        }
    }

    void parse_power() {
        parse_unary();
        if (peek().kind == Token::Kind::op && peek().op == '^') {
            take();
            parse_power();  // right-associative
            emit(Op::Kind::pow);
        }
    }

    void parse_unary() {
        bool negate = false;
        while (peek().kind == Token::Kind::op && (peek().op == '-' || peek().op == '+')) {
            if (take().op == '-') negate = !negate;
        }
        parse_primary();
        if (negate) emit(Op::Kind::neg);
    }

    void parse_primary() {
        if (++depth_ > 64) parse_fail(peek().pos, "expression nested too deeply");
        parse_primary_inner();
        --depth_;
    }

    void parse_primary_inner() {
        const Token t = take();
        switch (t.kind) {
            case Token::Kind::number:
                emit(Op::Kind::push_const, t.number);
                return;
            case Token::Kind::lparen: {
                parse_expr();
                const Token& close = take();
                if (close.kind != Token::Kind::rparen)
                    parse_fail(close.pos, "expected ')'");
                return;
            }
            case Token::Kind::ident:
                parse_ident(t);
                return;
            default:
                parse_fail(t.pos, "expected a number, name, or '('");
        }
    }

    void parse_ident(const Token& t) {
        static const std::map<std::string, Op::Kind> kFunctions = {
            {"exp", Op::Kind::fn_exp},   {"sin", Op::Kind::fn_sin}, {"cos", Op::Kind::fn_cos},
            {"sqrt", Op::Kind::fn_sqrt}, {"log", Op::Kind::fn_log},
        };
        if (peek().kind == Token::Kind::lparen) {
            take();  // '('
            if (t.ident == "pow") {
                parse_expr();
                const Token& comma = take();
                if (comma.kind != Token::Kind::comma)
                    parse_fail(comma.pos, "pow takes two arguments separated by ','");
                parse_expr();
                const Token& close = take();
                if (close.kind != Token::Kind::rparen) parse_fail(close.pos, "expected ')'");
                emit(Op::Kind::pow);
                return;
            }
            const auto fn = kFunctions.find(t.ident);
            if (fn == kFunctions.end())
                parse_fail(t.pos, "unknown function '" + t.ident + "'");
            parse_expr();
            const Token& close = take();
            if (close.kind != Token::Kind::rparen) parse_fail(close.pos, "expected ')'");
            emit(fn->second);
            return;
        }
        if (t.ident == "pi") {
            emit(Op::Kind::push_const, 3.14159265358979323846);
            return;
        }
        const auto var = vars_.find(t.ident);
        if (var == vars_.end()) parse_fail(t.pos, "unknown name '" + t.ident + "'");
        emit(Op::Kind::push_var, 0.0, var->second);
    }

    std::vector<Token> tokens_;
    std::size_t cursor_ = 0;
    int depth_ = 0;
    std::vector<Op> program_;
    std::map<std::string, int> vars_;
};

Expression Expression::parse(const std::string& text, const Grid& grid) {
    Expression e;
    e.text_ = text;
    e.program_ = ExpressionParser(text, grid).run();
    return e;
}

double Expression::eval(const std::array<double, kMaxDim>& x) const {
    double stack[256];
    int top = -1;
    for (const Op& op : program_) {
        switch (op.kind) {
            case Op::Kind::push_const:
                stack[++top] = op.value;
                break;
            case Op::Kind::push_var:
                stack[++top] = x[static_cast<std::size_t>(op.axis)];
                break;
            case Op::Kind::add:
                --top;
                stack[top] = stack[top] + stack[top + 1];
                break;
            case Op::Kind::sub:
                --top;
                stack[top] = stack[top] - stack[top + 1];
                break;
            case Op::Kind::mul:
                --top;
                stack[top] = stack[top] * stack[top + 1];
                break;
            case Op::Kind::div:
                --top;
                stack[top] = stack[top] / stack[top + 1];
                break;
            case Op::Kind::pow:
                --top;
                stack[top] = std::pow(stack[top], stack[top + 1]);
                break;
            case Op::Kind::neg:
                stack[top] = -stack[top];
                break;
            case Op::Kind::fn_exp:
                stack[top] = std::exp(stack[top]);
                break;
            case Op::Kind::fn_sin:
                stack[top] = std::sin(stack[top]);
                break;
            case Op::Kind::fn_cos:
                stack[top] = std::cos(stack[top]);
                break;
            case Op::Kind::fn_sqrt:
                stack[top] = std::sqrt(stack[top]);
                break;
            case Op::Kind::fn_log:
                stack[top] = std::log(stack[top]);
                break;
        }
    }
    return stack[0];
}

ScalarField sample_expression(const std::string& text, GridPtr grid, const char* field_name) {
    const Expression e = Expression::parse(text, *grid);
    ScalarField f = make_scalar(grid);
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < f.values.size(); ++p) {
        grid->point_coords(p, x);
        const double v = e.eval(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "field '" << field_name << "': expression '" << text
               << "' produced a non-finite value at point " << p;
            fail(ErrorKind::constraint, os.str());
        }
        f.values[p] = v;
    }
    return f;
}

}  // namespace madelung

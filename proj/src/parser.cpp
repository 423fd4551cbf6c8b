#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "fiscids/expr.hpp"

namespace fiscids {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& current() const { return current_; }

    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::size_t start = pos_;
        if (pos_ >= text_.size()) {
            current_ = {Tok::End, "", start};
            return;
        }
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            bool seen_dot = false;
            while (end < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[end])) ||
                    (!seen_dot && text_[end] == '.'))) {
                if (text_[end] == '.') seen_dot = true;
                ++end;
            }
            current_ = {Tok::Number, text_.substr(pos_, end - pos_), start};
            pos_ = end;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                ++end;
            current_ = {Tok::Ident, text_.substr(pos_, end - pos_), start};
            pos_ = end;
            return;
        }
        Tok k;
        switch (c) {
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case ',': k = Tok::Comma; break;
            default:
                throw SyntaxError(start, std::string("unexpected character '") + c + "'");
        }
        current_ = {k, text_.substr(pos_, 1), start};
        ++pos_;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
    Token current_{Tok::End, "", 0};
};

Rational decimal_to_rational(const std::string& text, std::size_t pos) {
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(Integer(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    if (digits.empty()) throw SyntaxError(pos, "malformed number '" + text + "'");
    Integer num(digits);
    Integer den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(num, den);
}

std::optional<FuncKind> lookup_function(const std::string& name) {
    if (name == "exp") return FuncKind::Exp;
    if (name == "log") return FuncKind::Log;
    if (name == "sin") return FuncKind::Sin;
    if (name == "cos") return FuncKind::Cos;
    if (name == "tan") return FuncKind::Tan;
    if (name == "atan") return FuncKind::Atan;
    if (name == "sqrt") return FuncKind::Sqrt;
    return std::nullopt;
}

// Function names that are recognized but have no differential rule here;
// naming them is a clearer failure than "unknown identifier".
bool is_known_unsupported(const std::string& name) {
    return name == "gamma" || name == "zeta" || name == "ln" || name == "abs" ||
           name == "sinh" || name == "cosh" || name == "tanh" || name == "asin" ||
           name == "acos";
}

class Parser {
public:
    Parser(const std::string& text, const std::vector<VarId>& vars)
        : lex_(text), vars_(vars) {}

    Expr parse() {
        Expr e = expression(0);
        if (lex_.current().kind != Tok::End)
            throw SyntaxError(lex_.current().pos, "unexpected '" + lex_.current().text + "'");
        return e;
    }

private:
    static int binding_power(Tok k) {
        switch (k) {
            case Tok::Plus:
            case Tok::Minus: return 10;
            case Tok::Star:
            case Tok::Slash: return 20;
            case Tok::Caret: return 30;
            default: return 0;
        }
    }

    Expr expression(int rbp) {
        Expr left = prefix();
        while (binding_power(lex_.current().kind) > rbp) {
            Token op = lex_.current();
            lex_.advance();
            left = infix(op, left);
        }
        return left;
    }

    Expr prefix() {
        Token t = lex_.current();
        switch (t.kind) {
            case Tok::Number:
                lex_.advance();
                return Expr::constant(decimal_to_rational(t.text, t.pos));
            case Tok::Ident:
                lex_.advance();
                return identifier(t);
            case Tok::Minus:
                lex_.advance();
                return Expr::neg(expression(25));
            case Tok::Plus:
                lex_.advance();
                return expression(25);
            case Tok::LParen: {
                lex_.advance();
                Expr inner = expression(0);
                expect(Tok::RParen, "expected ')'");
                return inner;
            }
            default:
                throw SyntaxError(t.pos, "unexpected '" + t.text + "'");
        }
    }

    Expr identifier(const Token& t) {
        if (lex_.current().kind == Tok::LParen) {
            if (auto fn = lookup_function(t.text)) {
                lex_.advance();
                Expr arg = expression(0);
                if (lex_.current().kind == Tok::Comma)
                    throw SyntaxError(lex_.current().pos,
                                      "'" + t.text + "' takes a single argument");
                expect(Tok::RParen, "expected ')'");
                return Expr::call(*fn, arg);
            }
            if (is_known_unsupported(t.text)) throw UnsupportedFunction(t.text);
        }
        for (const VarId& v : vars_)
            if (v.name == t.text) return Expr::variable(v);
        if (t.text == "pi") return Expr::named(NamedConst::Pi);
        if (t.text == "e") return Expr::named(NamedConst::Euler);
        throw UnknownIdentifier(t.text);
    }

    Expr infix(const Token& op, const Expr& left) {
        switch (op.kind) {
            case Tok::Plus:
                return Expr::add({left, expression(10)});
            case Tok::Minus:
                return Expr::sub(left, expression(10));
            case Tok::Star:
                return Expr::mul({left, expression(20)});
            case Tok::Slash:
                return Expr::div(left, expression(20));
            case Tok::Caret: {
                // Right-associative; the exponent must fold to a rational.
                Expr ex = expression(29);
                if (ex.kind() != ExprKind::Const)
                    throw SyntaxError(op.pos, "exponent must be a rational constant");
                return Expr::rpow(left, ex.value());
            }
            default:
                throw SyntaxError(op.pos, "unexpected '" + op.text + "'");
        }
    }

    void expect(Tok k, const std::string& msg) {
        if (lex_.current().kind != k) throw SyntaxError(lex_.current().pos, msg);
        lex_.advance();
    }

    Lexer lex_;
    const std::vector<VarId>& vars_;
};

}  // namespace

Expr parse_expression(const std::string& text, const std::vector<VarId>& vars) {
    return Parser(text, vars).parse();
}

}  // namespace fiscids

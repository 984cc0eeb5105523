// parser.hpp — text parser for scalar field expressions.
//
// Grammar (EBNF):
//
//   expr    = term { ("+" | "-") term } ;
//   term    = factor { ("*" | "/") factor } ;
//   factor  = "-" factor | power ;
//   power   = atom [ "^" integer ] ;
//   atom    = number | ident | ident "(" expr ")" | "(" expr ")" ;
//   ident   = letter { letter | digit | "_" } [ "@" integer ] ;
//   number  = digit { digit } [ "." { digit } ] [ ("e"|"E") [sign] digits ] ;
//
// Identifiers are either chart coordinates or calls of the univariate
// primitives sin, cos, exp, sqrt, expstep, smoothstep, bump.  Exponents are
// integer literals.  The optional "@k" suffix on a primitive denotes its
// k-th derivative (the printer emits it; scenario files never need it).
// Parse errors carry the 0-based character offset.

#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "pblab/expr.hpp"

namespace pblab {

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& what, std::size_t off)
        : std::runtime_error(what + " (offset " + std::to_string(off) + ")"),
          offset(off) {}
};

namespace detail {

class Parser {
public:
    Parser(std::string_view text, int dim, std::map<std::string, NodePtr> symbols)
        : text_(text), dim_(dim), symbols_(std::move(symbols)) {}

    NodePtr parse() {
        auto e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    NodePtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (eat('+')) lhs = add(lhs, parse_term());
            else if (eat('-')) lhs = sub(lhs, parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            if (eat('*')) lhs = mul(lhs, parse_factor());
            else if (eat('/')) lhs = div(lhs, parse_factor());
            else return lhs;
        }
    }

    NodePtr parse_factor() {
        if (eat('-')) return neg(parse_factor());
        return parse_power();
    }

    NodePtr parse_power() {
        auto base = parse_atom();
        if (eat('^')) {
            skip_ws();
            const bool negexp = eat('-');
            const auto k = parse_integer();
            if (!k) fail("expected integer exponent");
            return ipow(base, negexp ? -*k : *k);
        }
        return base;
    }

    std::optional<int> parse_integer() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start) return std::nullopt;
        return std::stoi(std::string(text_.substr(start, pos_ - start)));
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            auto e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // 'e' was an identifier boundary, not an exponent
            }
        }
        try {
            return constant(std::stod(std::string(text_.substr(start, pos_ - start))));
        } catch (const std::exception&) {
            pos_ = start;
            fail("malformed number");
        }
    }

    NodePtr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        int order = 0;
        if (pos_ < text_.size() && text_[pos_] == '@') {
            ++pos_;
            const auto k = parse_integer();
            if (!k) fail("expected derivative order after '@'");
            order = *k;
        }
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            auto arg = parse_expr();
            if (!eat(')')) fail("expected ')'");
            if (name == "bump") {
                if (order != 0) fail("bump has no '@' form; differentiate the tree");
                // exp(-1/(1-t^2)) == expstep(1-t^2)
                return call(Primitive{Prim::ExpStep, nullptr}, 0,
                            sub(constant(1.0), mul(arg, arg)));
            }
            const auto prim = primitive_by_name(name);
            if (!prim) { pos_ = start; fail("unknown function '" + name + "'"); }
            return call(*prim, order, arg);
        }
        if (order != 0) { pos_ = start; fail("'@' on a non-call identifier"); }
        const auto sym = symbols_.find(name);
        if (sym == symbols_.end()) { pos_ = start; fail("unknown symbol '" + name + "'"); }
        return sym->second;
    }

    static std::optional<Primitive> primitive_by_name(const std::string& name) {
        if (name == "sin") return Primitive{Prim::Sin, nullptr};
        if (name == "cos") return Primitive{Prim::Cos, nullptr};
        if (name == "exp") return Primitive{Prim::Exp, nullptr};
        if (name == "sqrt") return Primitive{Prim::Sqrt, nullptr};
        if (name == "expstep") return Primitive{Prim::ExpStep, nullptr};
        if (name == "smoothstep") return smoothstep_primitive();
        return std::nullopt;
    }

    std::string_view text_;
    int dim_;
    std::map<std::string, NodePtr> symbols_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Parses an expression over the chart's default coordinate names.  Extra
// named constants (e.g. a sequence index n) may be supplied; they shadow
// nothing and evaluate as fixed reals.
inline FieldExpr parse_field(std::string_view text, int dim,
                             const std::map<std::string, double>& constants = {}) {
    std::map<std::string, NodePtr> symbols;
    const auto names = default_coord_names(dim);
    for (int i = 0; i < dim; ++i) symbols[names[static_cast<std::size_t>(i)]] = detail::coord(i);
    if (dim == 2) {  // (q, p) aliases for position/momentum charts
        symbols["q"] = detail::coord(0);
        symbols["p"] = detail::coord(1);
    }
    symbols["pi"] = detail::constant(3.14159265358979323846);
    for (const auto& [k, v] : constants) symbols[k] = detail::constant(v);
    detail::Parser parser(text, dim, std::move(symbols));
    return {dim, parser.parse()};
}

}  // namespace pblab

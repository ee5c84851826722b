#include "hypsel/formula.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace hypsel {

namespace {

constexpr std::array<std::string_view, 5> kKeywords = {"not", "or", "true", "false", "mod"};

bool is_keyword(std::string_view s)
{
    return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

} // namespace

namespace lex {

bool is_ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::size_t scan_identifier(std::string_view text, std::size_t pos)
{
    if (pos >= text.size() || !is_ident_start(text[pos]))
        return 0;
    std::size_t i = pos + 1;
    while (i < text.size()) {
        if (is_ident_char(text[i]))
            ++i;
        else if (text[i] == '.' && i + 1 < text.size() && is_ident_char(text[i + 1]))
            i += 2;
        else
            break;
    }
    return i - pos;
}

} // namespace lex

bool is_identifier(std::string_view name)
{
    return !name.empty() && lex::scan_identifier(name, 0) == name.size() && !is_keyword(name);
}

std::string_view to_string(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Iff: return "<=>";
    case BinaryOp::Implies: return "=>";
    case BinaryOp::Or: return "or";
    case BinaryOp::And: return "&";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Neq: return "/=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::In: return ":";
    case BinaryOp::NotIn: return "/:";
    case BinaryOp::Subset: return "<:";
    case BinaryOp::StrictSubset: return "<<:";
    case BinaryOp::Maplet: return "|->";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "mod";
    }
    return "?";
}

std::string_view to_string(UnaryOp op)
{
    return op == UnaryOp::Not ? "not" : "-";
}

// ---------------------------------------------------------------------------
// Construction

Formula Formula::ident(std::string name)
{
    if (!is_identifier(name))
        throw std::invalid_argument("invalid identifier '" + name + "'");
    return Formula(std::make_shared<const Node>(Ident{std::move(name)}));
}

Formula Formula::integer(BigInt value)
{
    if (value < 0)
        throw std::invalid_argument("integer literals are non-negative; use unary minus");
    return Formula(std::make_shared<const Node>(IntLit{std::move(value)}));
}

Formula Formula::boolean(bool value)
{
    return Formula(std::make_shared<const Node>(BoolLit{value}));
}

Formula Formula::unary(UnaryOp op, Formula operand)
{
    return Formula(std::make_shared<const Node>(Unary{op, std::move(operand)}));
}

Formula Formula::binary(BinaryOp op, Formula lhs, Formula rhs)
{
    return Formula(std::make_shared<const Node>(Binary{op, std::move(lhs), std::move(rhs)}));
}

Formula Formula::quantified(Quantifier kind, std::vector<std::string> bound, Formula body)
{
    if (bound.empty())
        throw std::invalid_argument("quantifier without bound identifiers");
    for (std::size_t i = 0; i < bound.size(); ++i) {
        if (!is_identifier(bound[i]))
            throw std::invalid_argument("invalid bound identifier '" + bound[i] + "'");
        for (std::size_t j = 0; j < i; ++j)
            if (bound[i] == bound[j])
                throw std::invalid_argument("duplicate bound identifier '" + bound[i] + "'");
    }
    return Formula(std::make_shared<const Node>(Quantified{kind, std::move(bound), std::move(body)}));
}

Formula Formula::apply(Formula fn, std::vector<Formula> args)
{
    if (args.empty())
        throw std::invalid_argument("application without arguments");
    return Formula(std::make_shared<const Node>(Apply{std::move(fn), std::move(args)}));
}

bool operator==(const Formula &a, const Formula &b)
{
    return a.node_ == b.node_ || *a.node_ == *b.node_;
}

SyntaxError::SyntaxError(std::string message, int line, int column, std::vector<std::string> expected)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      detail_(std::move(message)), line_(line), column_(column), expected_(std::move(expected))
{
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Ident, Int, Keyword, Sym, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

// Longest match first.
constexpr std::array<std::string_view, 24> kSymbols = {
    "<<:", "<=>", "|->",
    "<=", "<:", "=>", "/=", "/:", ">=",
    "<", ">", "=", ":", "&", "+", "-", "*", "/", "(", ")", ",", ".", "!", "#"};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            if (pos_ >= text_.size()) {
                out.push_back({Tok::End, "end of input", line_, col_});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    void advance(std::size_t n)
    {
        for (std::size_t k = 0; k < n; ++k, ++pos_) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
        }
    }

    void skip_space_and_comments()
    {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else if (text_.substr(pos_, 2) == "/*") {
                int line = line_, col = col_;
                auto end = text_.find("*/", pos_ + 2);
                if (end == std::string_view::npos)
                    throw SyntaxError("unterminated comment", line, col, {"*/"});
                advance(end + 2 - pos_);
            } else {
                return;
            }
        }
    }

    Token next()
    {
        int line = line_, col = col_;
        char c = text_[pos_];
        if (std::size_t n = lex::scan_identifier(text_, pos_)) {
            std::string word(text_.substr(pos_, n));
            advance(n);
            return {is_keyword(word) ? Tok::Keyword : Tok::Ident, std::move(word), line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t n = 0;
            while (pos_ + n < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + n])))
                ++n;
            if (pos_ + n < text_.size() && lex::is_ident_start(text_[pos_ + n]))
                throw SyntaxError("malformed number", line, col, {});
            std::string digits(text_.substr(pos_, n));
            advance(n);
            return {Tok::Int, std::move(digits), line, col};
        }
        for (auto sym : kSymbols) {
            if (text_.substr(pos_, sym.size()) == sym) {
                advance(sym.size());
                return {Tok::Sym, std::string(sym), line, col};
            }
        }
        std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + [&] {
            std::ostringstream os;
            os << std::hex << (static_cast<unsigned>(static_cast<unsigned char>(c)));
            return os.str();
        }();
        throw SyntaxError("unexpected character '" + shown + "'", line, col, {});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Formula parse_all()
    {
        Formula f = iff();
        if (peek().kind != Tok::End)
            fail({"end of input", "<=>", "=>", "or", "&"});
        return f;
    }

private:
    const Token &peek() const { return toks_[pos_]; }

    bool at_sym(std::string_view s) const { return peek().kind == Tok::Sym && peek().text == s; }
    bool at_kw(std::string_view s) const { return peek().kind == Tok::Keyword && peek().text == s; }

    [[noreturn]] void fail(std::vector<std::string> expected) const
    {
        const Token &t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        std::string msg = "unexpected " + got;
        if (!expected.empty()) {
            msg += ", expected ";
            for (std::size_t i = 0; i < expected.size(); ++i)
                msg += (i ? ", " : "") + expected[i];
        }
        throw SyntaxError(msg, t.line, t.column, std::move(expected));
    }

    void expect_sym(std::string_view s)
    {
        if (!at_sym(s))
            fail({std::string(s)});
        ++pos_;
    }

    Formula iff()
    {
        Formula lhs = impl();
        while (at_sym("<=>")) {
            ++pos_;
            lhs = Formula::binary(BinaryOp::Iff, lhs, impl());
        }
        return lhs;
    }

    Formula impl()
    {
        Formula lhs = disj();
        if (at_sym("=>")) {
            ++pos_;
            return Formula::binary(BinaryOp::Implies, lhs, impl());
        }
        return lhs;
    }

    Formula disj()
    {
        Formula lhs = conj();
        while (at_kw("or")) {
            ++pos_;
            lhs = Formula::binary(BinaryOp::Or, lhs, conj());
        }
        return lhs;
    }

    Formula conj()
    {
        Formula lhs = negation();
        while (at_sym("&")) {
            ++pos_;
            lhs = Formula::binary(BinaryOp::And, lhs, negation());
        }
        return lhs;
    }

    Formula negation()
    {
        if (at_kw("not")) {
            ++pos_;
            return Formula::unary(UnaryOp::Not, negation());
        }
        return comparison();
    }

    static const BinaryOp *comparison_op(const Token &t)
    {
        static const std::pair<std::string_view, BinaryOp> table[] = {
            {"=", BinaryOp::Eq}, {"/=", BinaryOp::Neq}, {"<", BinaryOp::Lt}, {"<=", BinaryOp::Le},
            {">", BinaryOp::Gt}, {">=", BinaryOp::Ge}, {":", BinaryOp::In}, {"/:", BinaryOp::NotIn},
            {"<:", BinaryOp::Subset}, {"<<:", BinaryOp::StrictSubset},
        };
        if (t.kind != Tok::Sym)
            return nullptr;
        for (const auto &[s, op] : table)
            if (s == t.text)
                return &op;
        return nullptr;
    }

    Formula comparison()
    {
        Formula lhs = maplet();
        if (const BinaryOp *op = comparison_op(peek())) {
            ++pos_;
            Formula rhs = maplet();
            if (comparison_op(peek()))
                throw SyntaxError("comparison operators are non-associative; add parentheses",
                                  peek().line, peek().column, {});
            return Formula::binary(*op, lhs, rhs);
        }
        return lhs;
    }

    Formula maplet()
    {
        Formula lhs = arith();
        while (at_sym("|->")) {
            ++pos_;
            lhs = Formula::binary(BinaryOp::Maplet, lhs, arith());
        }
        return lhs;
    }

    Formula arith()
    {
        Formula lhs = term();
        for (;;) {
            if (at_sym("+")) {
                ++pos_;
                lhs = Formula::binary(BinaryOp::Add, lhs, term());
            } else if (at_sym("-")) {
                ++pos_;
                lhs = Formula::binary(BinaryOp::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    Formula term()
    {
        Formula lhs = factor();
        for (;;) {
            if (at_sym("*")) {
                ++pos_;
                lhs = Formula::binary(BinaryOp::Mul, lhs, factor());
            } else if (at_sym("/")) {
                ++pos_;
                lhs = Formula::binary(BinaryOp::Div, lhs, factor());
            } else if (at_kw("mod")) {
                ++pos_;
                lhs = Formula::binary(BinaryOp::Mod, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    Formula factor()
    {
        if (at_sym("-")) {
            ++pos_;
            return Formula::unary(UnaryOp::Neg, factor());
        }
        return application();
    }

    Formula application()
    {
        Formula fn = atom();
        while (at_sym("(")) {
            ++pos_;
            std::vector<Formula> args{iff()};
            while (at_sym(",")) {
                ++pos_;
                args.push_back(iff());
            }
            if (!at_sym(")"))
                fail({")", ","});
            ++pos_;
            fn = Formula::apply(fn, std::move(args));
        }
        return fn;
    }

    std::string bound_identifier()
    {
        const Token &t = peek();
        if (t.kind == Tok::Keyword)
            throw SyntaxError("keyword '" + t.text + "' cannot be bound by a quantifier", t.line, t.column,
                              {"identifier"});
        if (t.kind != Tok::Ident)
            fail({"identifier"});
        ++pos_;
        return t.text;
    }

    Formula atom()
    {
        const Token &t = peek();
        switch (t.kind) {
        case Tok::Ident:
            ++pos_;
            return Formula::ident(t.text);
        case Tok::Int:
            ++pos_;
            return Formula::integer(BigInt(t.text));
        case Tok::Keyword:
            if (t.text == "true" || t.text == "false") {
                ++pos_;
                return Formula::boolean(t.text == "true");
            }
            throw SyntaxError("keyword '" + t.text + "' used where an operand is expected", t.line, t.column,
                              {"identifier", "integer", "true", "false", "(", "!", "#"});
        case Tok::Sym:
            if (t.text == "(") {
                ++pos_;
                Formula inner = iff();
                expect_sym(")");
                return inner;
            }
            if (t.text == "!" || t.text == "#") {
                Quantifier kind = t.text == "!" ? Quantifier::ForAll : Quantifier::Exists;
                ++pos_;
                std::vector<std::string> bound;
                int bline = peek().line, bcol = peek().column;
                bound.push_back(bound_identifier());
                while (at_sym(",")) {
                    ++pos_;
                    bound.push_back(bound_identifier());
                }
                for (std::size_t i = 0; i < bound.size(); ++i)
                    for (std::size_t j = 0; j < i; ++j)
                        if (bound[i] == bound[j])
                            throw SyntaxError("duplicate bound identifier '" + bound[i] + "'", bline, bcol, {});
                if (!at_sym("."))
                    fail({".", ","});
                ++pos_;
                expect_sym("(");
                Formula body = iff();
                expect_sym(")");
                return Formula::quantified(kind, std::move(bound), body);
            }
            break;
        case Tok::End:
            break;
        }
        fail({"identifier", "integer", "true", "false", "(", "!", "#", "-", "not"});
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

enum Level : int {
    kIff = 1, kImplies, kOr, kAnd, kNot, kCmp, kMaplet, kAdd, kMul, kNeg, kApp, kAtom
};

int level_of(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Iff: return kIff;
    case BinaryOp::Implies: return kImplies;
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Maplet: return kMaplet;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return kMul;
    default: return kCmp;
    }
}

int level_of(const Formula &f)
{
    return std::visit(
        [](const auto &n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Unary>)
                return n.op == UnaryOp::Not ? kNot : kNeg;
            else if constexpr (std::is_same_v<T, Binary>)
                return level_of(n.op);
            else if constexpr (std::is_same_v<T, Apply>)
                return kApp;
            else
                return kAtom;
        },
        f.node());
}

void emit(const Formula &f, int min_level, std::string &out);

void emit_node(const Formula &f, std::string &out)
{
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Ident>) {
                out += n.name;
            } else if constexpr (std::is_same_v<T, IntLit>) {
                out += n.value.str();
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                out += n.value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, Unary>) {
                if (n.op == UnaryOp::Not) {
                    out += "not ";
                    emit(n.operand, kNot, out);
                } else {
                    out += '-';
                    emit(n.operand, kNeg, out);
                }
            } else if constexpr (std::is_same_v<T, Binary>) {
                int lvl = level_of(n.op);
                int lmin = lvl, rmin = lvl + 1;
                if (n.op == BinaryOp::Implies) {
                    lmin = lvl + 1;
                    rmin = lvl;
                } else if (lvl == kCmp) {
                    lmin = lvl + 1;
                }
                emit(n.lhs, lmin, out);
                out += ' ';
                out += to_string(n.op);
                out += ' ';
                emit(n.rhs, rmin, out);
            } else if constexpr (std::is_same_v<T, Quantified>) {
                out += n.kind == Quantifier::ForAll ? '!' : '#';
                for (std::size_t i = 0; i < n.bound.size(); ++i) {
                    if (i)
                        out += ',';
                    out += n.bound[i];
                }
                out += ".(";
                emit(n.body, kIff, out);
                out += ')';
            } else if constexpr (std::is_same_v<T, Apply>) {
                emit(n.fn, kApp, out);
                out += '(';
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i)
                        out += ", ";
                    emit(n.args[i], kIff, out);
                }
                out += ')';
            }
        },
        f.node());
}

void emit(const Formula &f, int min_level, std::string &out)
{
    if (level_of(f) < min_level) {
        out += '(';
        emit_node(f, out);
        out += ')';
    } else {
        emit_node(f, out);
    }
}

void collect_free(const Formula &f, std::vector<std::string_view> &bound, IdentSet &out)
{
    std::visit(
        [&](const auto &n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Ident>) {
                if (std::find(bound.begin(), bound.end(), n.name) == bound.end())
                    out.insert(n.name);
            } else if constexpr (std::is_same_v<T, Unary>) {
                collect_free(n.operand, bound, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                collect_free(n.lhs, bound, out);
                collect_free(n.rhs, bound, out);
            } else if constexpr (std::is_same_v<T, Quantified>) {
                std::size_t mark = bound.size();
                bound.insert(bound.end(), n.bound.begin(), n.bound.end());
                collect_free(n.body, bound, out);
                bound.resize(mark);
            } else if constexpr (std::is_same_v<T, Apply>) {
                collect_free(n.fn, bound, out);
                for (const auto &a : n.args)
                    collect_free(a, bound, out);
            }
        },
        f.node());
}

} // namespace

Formula parse_formula(std::string_view text)
{
    return Parser(Lexer(text).run()).parse_all();
}

std::string print_formula(const Formula &f)
{
    std::string out;
    emit(f, kIff, out);
    return out;
}

IdentSet free_identifiers(const Formula &f)
{
    IdentSet out;
    std::vector<std::string_view> bound;
    collect_free(f, bound, out);
    return out;
}

} // namespace hypsel

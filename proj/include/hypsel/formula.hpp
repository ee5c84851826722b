#pragma once

// Untyped B-style predicates: AST, parser, canonical printer and the
// free-identifier function used by every selection command.

#include <boost/multiprecision/cpp_int.hpp>

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hypsel {

using BigInt = boost::multiprecision::cpp_int;
using IdentSet = std::set<std::string>;

/// True when `name` is a well-formed identifier that is not a keyword.
bool is_identifier(std::string_view name);

enum class UnaryOp { Not, Neg };

enum class BinaryOp {
    Iff, Implies, Or, And,
    Eq, Neq, Lt, Le, Gt, Ge, In, NotIn, Subset, StrictSubset,
    Maplet,
    Add, Sub,
    Mul, Div, Mod,
};

enum class Quantifier { ForAll, Exists };

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryOp op);

class Formula;

struct Ident {
    std::string name;
    bool operator==(const Ident &) const = default;
};
struct IntLit {
    BigInt value;
    bool operator==(const IntLit &) const = default;
};
struct BoolLit {
    bool value;
    bool operator==(const BoolLit &) const = default;
};
struct Unary;
struct Binary;
struct Quantified;
struct Apply;

/// Immutable, shareable formula tree. Copies share nodes.
class Formula {
public:
    using Node = std::variant<Ident, IntLit, BoolLit, Unary, Binary, Quantified, Apply>;

    static Formula ident(std::string name);
    static Formula integer(BigInt value);
    static Formula boolean(bool value);
    static Formula unary(UnaryOp op, Formula operand);
    static Formula binary(BinaryOp op, Formula lhs, Formula rhs);
    static Formula quantified(Quantifier kind, std::vector<std::string> bound, Formula body);
    static Formula apply(Formula fn, std::vector<Formula> args);

    const Node &node() const;

    template <class T>
    const T *as() const;

    friend bool operator==(const Formula &a, const Formula &b);

private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct Unary {
    UnaryOp op;
    Formula operand;
    bool operator==(const Unary &) const = default;
};
struct Binary {
    BinaryOp op;
    Formula lhs;
    Formula rhs;
    bool operator==(const Binary &) const = default;
};
struct Quantified {
    Quantifier kind;
    std::vector<std::string> bound;
    Formula body;
    bool operator==(const Quantified &) const = default;
};
struct Apply {
    Formula fn;
    std::vector<Formula> args;
    bool operator==(const Apply &) const = default;
};

inline const Formula::Node &Formula::node() const { return *node_; }

template <class T>
const T *Formula::as() const
{
    return std::get_if<T>(node_.get());
}

/// Raised by parse_formula. Line and column are 1-based.
class SyntaxError : public std::runtime_error {
public:
    SyntaxError(std::string message, int line, int column, std::vector<std::string> expected);

    int line() const { return line_; }
    int column() const { return column_; }
    const std::vector<std::string> &expected() const { return expected_; }
    /// The message without the position prefix.
    const std::string &detail() const { return detail_; }

private:
    std::string detail_;
    int line_;
    int column_;
    std::vector<std::string> expected_;
};

Formula parse_formula(std::string_view text);

/// Canonical form: single spaces around binary operators, minimal parentheses.
std::string print_formula(const Formula &f);

/// Identifiers occurring free in `f`. Applied function symbols count as free.
IdentSet free_identifiers(const Formula &f);

// Lexical helpers shared with the script parser.
namespace lex {
bool is_ident_start(char c);
bool is_ident_char(char c);
/// Length of the identifier token starting at text[pos], 0 if none.
/// A '.' continues an identifier only when another identifier character follows.
std::size_t scan_identifier(std::string_view text, std::size_t pos);
} // namespace lex

} // namespace hypsel

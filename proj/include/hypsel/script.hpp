#pragma once

// The command language: commands separated by `&` or newlines, `#` comments.
//
//   ah | dh | chctx(c) | chlex(l) | mklex | mklex(i1,..) | mkctx(Some)
//   | mkctx(All) | mkctx(h1,..) | ne | pv | pr
//
// Creation commands accept an `as <name>` suffix.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypsel {

enum class CommandKind {
    AddHyps,      // ah
    DropHyps,     // dh
    ChangeContext,
    ChangeLexicon,
    MakeLexicon,      // mklex: fv of the current context
    MakeLexiconIds,   // mklex(i1, ..)
    MakeContextSome,  // mkctx(Some)
    MakeContextAll,   // mkctx(All)
    MakeContextIds,   // mkctx(h1, ..)
    Next,
    Prev,
    Prove,
};

struct Command {
    CommandKind kind;
    std::vector<std::string> args;
    std::optional<std::string> alias;

    bool operator==(const Command &) const = default;

    bool creates() const;
};

std::string format_command(const Command &cmd);

struct Script {
    std::vector<Command> commands;
    std::string source_text;
};

class ScriptError : public std::runtime_error {
public:
    /// `command_index` is 0-based; line/column are 1-based.
    ScriptError(std::string detail, std::size_t command_index, int line, int column);

    std::size_t command_index() const { return index_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    std::size_t index_;
    int line_;
    int column_;
};

Script parse_script(std::string_view text);

/// One command per line, each terminated by a newline.
std::string format_script(const std::vector<Command> &commands);
inline std::string format_script(const Script &s) { return format_script(s.commands); }

/// Name token accepted for contexts, lexicons and hypothesis ids.
bool is_name_token(std::string_view s);

} // namespace hypsel

#include "hypsel/script.hpp"

#include "hypsel/formula.hpp"

#include <algorithm>

namespace hypsel {

bool Command::creates() const
{
    switch (kind) {
    case CommandKind::MakeLexicon:
    case CommandKind::MakeLexiconIds:
    case CommandKind::MakeContextSome:
    case CommandKind::MakeContextAll:
    case CommandKind::MakeContextIds:
        return true;
    default:
        return false;
    }
}

namespace {

std::string joined(const std::vector<std::string> &args)
{
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i)
        out += (i ? ", " : "") + args[i];
    return out;
}

bool is_name_char(char c)
{
    return lex::is_ident_char(c) || c == '.';
}

} // namespace

bool is_name_token(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), is_name_char);
}

std::string format_command(const Command &cmd)
{
    std::string out;
    switch (cmd.kind) {
    case CommandKind::AddHyps: out = "ah"; break;
    case CommandKind::DropHyps: out = "dh"; break;
    case CommandKind::ChangeContext: out = "chctx(" + joined(cmd.args) + ")"; break;
    case CommandKind::ChangeLexicon: out = "chlex(" + joined(cmd.args) + ")"; break;
    case CommandKind::MakeLexicon: out = "mklex"; break;
    case CommandKind::MakeLexiconIds: out = "mklex(" + joined(cmd.args) + ")"; break;
    case CommandKind::MakeContextSome: out = "mkctx(Some)"; break;
    case CommandKind::MakeContextAll: out = "mkctx(All)"; break;
    case CommandKind::MakeContextIds: out = "mkctx(" + joined(cmd.args) + ")"; break;
    case CommandKind::Next: out = "ne"; break;
    case CommandKind::Prev: out = "pv"; break;
    case CommandKind::Prove: out = "pr"; break;
    }
    if (cmd.alias)
        out += " as " + *cmd.alias;
    return out;
}

std::string format_script(const std::vector<Command> &commands)
{
    std::string out;
    for (const auto &c : commands) {
        out += format_command(c);
        out += '\n';
    }
    return out;
}

ScriptError::ScriptError(std::string detail, std::size_t command_index, int line, int column)
    : std::runtime_error("command " + std::to_string(command_index + 1) + " (" + std::to_string(line) + ":" +
                         std::to_string(column) + "): " + detail),
      index_(command_index), line_(line), column_(column)
{
}

namespace {

enum class STok { Name, LParen, RParen, Comma, Sep, End };

struct SToken {
    STok kind;
    std::string text;
    int line;
    int column;
};

class ScriptParser {
public:
    explicit ScriptParser(std::string_view text) : text_(text) { tokenize(); }

    std::vector<Command> run()
    {
        std::vector<Command> out;
        skip_separators();
        while (peek().kind != STok::End) {
            out.push_back(command(out.size()));
            if (peek().kind != STok::Sep && peek().kind != STok::End)
                fail(out.size() - 1, "expected '&' or end of line after command, found " + describe(peek()));
            skip_separators();
        }
        return out;
    }

private:
    void tokenize()
    {
        std::size_t i = 0;
        int line = 1, col = 1;
        auto step = [&](std::size_t n) {
            for (std::size_t k = 0; k < n; ++k, ++i) {
                if (text_[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
        };
        while (i < text_.size()) {
            char c = text_[i];
            if (c == '#') {
                while (i < text_.size() && text_[i] != '\n')
                    step(1);
            } else if (c == '\n' || c == '&') {
                toks_.push_back({STok::Sep, std::string(1, c), line, col});
                step(1);
            } else if (c == ' ' || c == '\t' || c == '\r') {
                step(1);
            } else if (c == '(' || c == ')' || c == ',') {
                toks_.push_back({c == '(' ? STok::LParen : c == ')' ? STok::RParen : STok::Comma, std::string(1, c),
                                 line, col});
                step(1);
            } else if (is_name_char(c)) {
                std::size_t n = 0;
                while (i + n < text_.size() && is_name_char(text_[i + n]))
                    ++n;
                toks_.push_back({STok::Name, std::string(text_.substr(i, n)), line, col});
                step(n);
            } else {
                unsigned char uc = static_cast<unsigned char>(c);
                std::string shown = (uc >= 0x20 && uc < 0x7f) ? std::string(1, c) : "byte " + std::to_string(uc);
                std::size_t index = static_cast<std::size_t>(
                    std::count_if(toks_.begin(), toks_.end(), [](const SToken &t) { return t.kind == STok::Sep; }));
                throw ScriptError("unexpected character '" + shown + "'", index, line, col);
            }
        }
        toks_.push_back({STok::End, "", line, col});
    }

    const SToken &peek() const { return toks_[pos_]; }

    static std::string describe(const SToken &t)
    {
        switch (t.kind) {
        case STok::End: return "end of input";
        case STok::Sep: return t.text == "\n" ? "end of line" : "'&'";
        default: return "'" + t.text + "'";
        }
    }

    [[noreturn]] void fail(std::size_t index, const std::string &detail) const
    {
        throw ScriptError(detail, index, peek().line, peek().column);
    }

    void skip_separators()
    {
        while (peek().kind == STok::Sep)
            ++pos_;
    }

    std::vector<std::string> argument_list(std::size_t index)
    {
        // Caller has consumed '('.
        std::vector<std::string> args;
        if (peek().kind == STok::RParen)
            fail(index, "empty argument list");
        for (;;) {
            if (peek().kind != STok::Name)
                fail(index, "expected a name, found " + describe(peek()));
            args.push_back(peek().text);
            ++pos_;
            if (peek().kind == STok::Comma) {
                ++pos_;
                continue;
            }
            if (peek().kind == STok::RParen) {
                ++pos_;
                return args;
            }
            fail(index, "expected ',' or ')', found " + describe(peek()));
        }
    }

    Command command(std::size_t index)
    {
        const SToken head = peek();
        if (head.kind != STok::Name)
            fail(index, "expected a command, found " + describe(head));
        ++pos_;
        std::optional<std::vector<std::string>> args;
        if (peek().kind == STok::LParen) {
            ++pos_;
            args = argument_list(index);
        }

        const std::string &name = head.text;
        auto no_args = [&](CommandKind k) {
            if (args)
                throw ScriptError("'" + name + "' takes no arguments", index, head.line, head.column);
            return Command{k, {}, std::nullopt};
        };
        auto one_arg = [&](CommandKind k) {
            if (!args || args->size() != 1)
                throw ScriptError("'" + name + "' takes exactly one argument", index, head.line, head.column);
            return Command{k, *args, std::nullopt};
        };

        Command cmd{CommandKind::AddHyps, {}, std::nullopt};
        if (name == "ah")
            cmd = no_args(CommandKind::AddHyps);
        else if (name == "dh")
            cmd = no_args(CommandKind::DropHyps);
        else if (name == "ne")
            cmd = no_args(CommandKind::Next);
        else if (name == "pv")
            cmd = no_args(CommandKind::Prev);
        else if (name == "pr")
            cmd = no_args(CommandKind::Prove);
        else if (name == "chctx")
            cmd = one_arg(CommandKind::ChangeContext);
        else if (name == "chlex")
            cmd = one_arg(CommandKind::ChangeLexicon);
        else if (name == "mklex") {
            if (args)
                for (const auto &a : *args)
                    if (!is_identifier(a))
                        throw ScriptError("'" + a + "' is not an identifier", index, head.line, head.column);
            cmd = args ? Command{CommandKind::MakeLexiconIds, *args, std::nullopt}
                       : Command{CommandKind::MakeLexicon, {}, std::nullopt};
        }
        else if (name == "mkctx") {
            if (!args)
                throw ScriptError("'mkctx' needs an argument list", index, head.line, head.column);
            bool keyword = std::any_of(args->begin(), args->end(),
                                       [](const std::string &a) { return a == "Some" || a == "All"; });
            if (keyword && args->size() != 1)
                throw ScriptError("'Some'/'All' must be the only argument of 'mkctx'", index, head.line,
                                  head.column);
            if (keyword)
                cmd = Command{(*args)[0] == "Some" ? CommandKind::MakeContextSome : CommandKind::MakeContextAll,
                              {}, std::nullopt};
            else
                cmd = Command{CommandKind::MakeContextIds, *args, std::nullopt};
        } else {
            throw ScriptError("unknown command '" + name + "'", index, head.line, head.column);
        }

        if (peek().kind == STok::Name && peek().text == "as") {
            if (!cmd.creates())
                fail(index, "'as' is only allowed after mklex/mkctx");
            ++pos_;
            if (peek().kind != STok::Name)
                fail(index, "expected a name after 'as', found " + describe(peek()));
            cmd.alias = peek().text;
            ++pos_;
        }
        return cmd;
    }

    std::string_view text_;
    std::vector<SToken> toks_;
    std::size_t pos_ = 0;
};

} // namespace

Script parse_script(std::string_view text)
{
    return Script{ScriptParser(text).run(), std::string(text)};
}

} // namespace hypsel

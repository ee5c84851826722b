#include "hypsel/provers.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace hypsel {

using Clock = std::chrono::steady_clock;

std::string_view to_string(VerdictKind kind)
{
    switch (kind) {
    case VerdictKind::Valid: return "valid";
    case VerdictKind::Countermodel: return "countermodel";
    case VerdictKind::Unknown: return "unknown";
    case VerdictKind::Timeout: return "timeout";
    case VerdictKind::Error: return "error";
    }
    return "unknown";
}

ProverConfig builtin_config()
{
    ProverConfig c;
    c.name = std::string(kBuiltinProver);
    c.timeout_s = 10.0;
    return c;
}

std::string export_lemma(const Lemma &lemma)
{
    std::string out;
    for (const auto &h : lemma.hypotheses) {
        out += "hyp: ";
        out += print_formula(h.formula);
        out += '\n';
    }
    out += "goal: ";
    out += print_formula(lemma.goal);
    out += '\n';
    return out;
}

std::string fingerprint(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

class ValueReader {
public:
    ValueReader(std::string_view text, int line) : text_(text), line_(line) {}

    [[noreturn]] void fail(const std::string &what) const
    {
        throw RegistryError("registry line " + std::to_string(line_) + ": " + what);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    bool at_end()
    {
        skip_space();
        return pos_ >= text_.size() || text_[pos_] == '#';
    }

    std::string string()
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '\'') {
            std::size_t close = text_.find('\'', pos_ + 1);
            if (close == std::string_view::npos)
                fail("unterminated string");
            std::string out(text_.substr(pos_ + 1, close - pos_ - 1));
            pos_ = close + 1;
            return out;
        }
        if (pos_ >= text_.size() || text_[pos_] != '"')
            fail("expected a quoted string");
        ++pos_;
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_++];
            if (c == '\\') {
                if (pos_ >= text_.size())
                    break;
                char e = text_[pos_++];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
        if (pos_ >= text_.size())
            fail("unterminated string");
        ++pos_;
        return out;
    }

    std::vector<std::string> string_array()
    {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != '[')
            fail("expected an array of strings");
        ++pos_;
        std::vector<std::string> out;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            return out;
        }
        for (;;) {
            out.push_back(string());
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == ',') {
                ++pos_;
                skip_space();
                if (pos_ < text_.size() && text_[pos_] == ']') {
                    ++pos_;
                    return out;
                }
                continue;
            }
            if (pos_ < text_.size() && text_[pos_] == ']') {
                ++pos_;
                return out;
            }
            fail("expected ',' or ']' in array");
        }
    }

    double number()
    {
        skip_space();
        std::size_t end = pos_;
        while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
                                      text_[end] == '-' || text_[end] == '+' || text_[end] == 'e'))
            ++end;
        std::string digits(text_.substr(pos_, end - pos_));
        char *stop = nullptr;
        double v = std::strtod(digits.c_str(), &stop);
        if (digits.empty() || stop != digits.c_str() + digits.size())
            fail("expected a number");
        pos_ = end;
        return v;
    }

    bool boolean()
    {
        skip_space();
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return true;
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return false;
        }
        fail("expected true or false");
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
};

void finish_entry(std::vector<ProverConfig> &out, ProverConfig &cur, bool have_name, bool have_command, int line)
{
    std::string where = "registry entry ending before line " + std::to_string(line);
    if (!have_name)
        throw RegistryError(where + ": missing 'name'");
    if (!have_command)
        throw RegistryError("prover '" + cur.name + "': missing 'command'");
    if (cur.name == kBuiltinProver)
        throw RegistryError("prover name 'builtin' is reserved");
    if (!(cur.timeout_s > 0))
        throw RegistryError("prover '" + cur.name + "': timeout_s must be positive");
    for (const auto &p : out)
        if (p.name == cur.name)
            throw RegistryError("duplicate prover name '" + cur.name + "'");
    out.push_back(std::move(cur));
}

} // namespace

std::vector<ProverConfig> parse_registry(std::string_view text)
{
    std::vector<ProverConfig> out;
    std::optional<ProverConfig> cur;
    bool have_name = false, have_command = false;
    std::vector<std::string> seen_keys;

    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#')
            continue;
        if (s == "[[prover]]") {
            if (cur)
                finish_entry(out, *cur, have_name, have_command, line);
            cur = ProverConfig{};
            have_name = have_command = false;
            seen_keys.clear();
            continue;
        }
        if (s[0] == '[')
            throw RegistryError("registry line " + std::to_string(line) + ": only [[prover]] tables are supported");
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw RegistryError("registry line " + std::to_string(line) + ": expected key = value");
        if (!cur)
            throw RegistryError("registry line " + std::to_string(line) + ": key outside a [[prover]] table");
        std::string key = trim(std::string_view(s).substr(0, eq));
        if (std::find(seen_keys.begin(), seen_keys.end(), key) != seen_keys.end())
            throw RegistryError("registry line " + std::to_string(line) + ": duplicate key '" + key + "'");
        seen_keys.push_back(key);
        ValueReader v(std::string_view(s).substr(eq + 1), line);
        if (key == "name") {
            cur->name = v.string();
            have_name = !cur->name.empty();
        } else if (key == "command") {
            cur->command_template = v.string();
            have_command = !cur->command_template.empty();
        } else if (key == "timeout_s") {
            cur->timeout_s = v.number();
        } else if (key == "valid_patterns") {
            cur->valid_patterns = v.string_array();
        } else if (key == "invalid_patterns") {
            cur->invalid_patterns = v.string_array();
        } else if (key == "enabled") {
            cur->enabled = v.boolean();
        } else {
            v.fail("unknown key '" + key + "'");
        }
        if (!v.at_end())
            v.fail("trailing characters after value");
    }
    if (cur)
        finish_entry(out, *cur, have_name, have_command, line + 1);
    return out;
}

std::optional<std::filesystem::path> resolve_executable(const std::string &command_template)
{
    std::istringstream words(command_template);
    std::string exe;
    words >> exe;
    if (exe.empty())
        return std::nullopt;
    auto runnable = [](const std::filesystem::path &p) {
        std::error_code ec;
        return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
    };
    if (exe.find('/') != std::string::npos)
        return runnable(exe) ? std::optional<std::filesystem::path>(exe) : std::nullopt;
    const char *path = std::getenv("PATH");
    std::istringstream dirs(path ? path : "");
    for (std::string dir; std::getline(dirs, dir, ':');) {
        std::filesystem::path candidate = std::filesystem::path(dir.empty() ? "." : dir) / exe;
        if (runnable(candidate))
            return candidate;
    }
    return std::nullopt;
}

std::vector<ProverConfig> discover_provers(const std::optional<std::filesystem::path> &registry_path)
{
    std::vector<ProverConfig> out;
    if (registry_path) {
        std::ifstream in(*registry_path);
        if (!in)
            throw RegistryError("cannot open registry '" + registry_path->string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        out = parse_registry(buf.str());
    }
    for (auto &p : out) {
        if (p.enabled && !resolve_executable(p.command_template)) {
            p.enabled = false;
            p.note = "executable not found on the search path";
        }
    }
    out.push_back(builtin_config());
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch

namespace {

std::string shell_quote(const std::string &s)
{
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    return out + "'";
}

std::string format_seconds(double s)
{
    if (s == std::floor(s))
        return std::to_string(static_cast<long long>(s));
    std::ostringstream os;
    os << s;
    return os.str();
}

bool bounded_match(const std::string &text, const std::string &pattern)
{
    if (pattern.empty())
        return false;
    auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    for (std::size_t at = text.find(pattern); at != std::string::npos; at = text.find(pattern, at + 1)) {
        bool left_ok = at == 0 || !word(text[at - 1]) || !word(pattern.front());
        std::size_t end = at + pattern.size();
        bool right_ok = end == text.size() || !word(text[end]) || !word(pattern.back());
        if (left_ok && right_ok)
            return true;
    }
    return false;
}

struct TempFile {
    std::filesystem::path path;

    explicit TempFile(std::filesystem::path p) : path(std::move(p)) {}
    TempFile(TempFile &&other) noexcept : path(std::exchange(other.path, {})) {}
    TempFile &operator=(TempFile &&) = delete;
    ~TempFile()
    {
        if (!path.empty()) {
            std::error_code ec;
            std::filesystem::remove(path, ec);
        }
    }
};

TempFile write_temp(const std::string &contents)
{
    std::string tmpl = (std::filesystem::temp_directory_path() / "hypsel-lemma-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    int fd = ::mkstemp(buf.data());
    if (fd < 0)
        throw std::runtime_error(std::string("cannot create lemma file: ") + std::strerror(errno));
    TempFile f{buf.data()};
    std::size_t done = 0;
    while (done < contents.size()) {
        ssize_t n = ::write(fd, contents.data() + done, contents.size() - done);
        if (n < 0 && errno == EINTR)
            continue;
        if (n < 0) {
            ::close(fd);
            throw std::runtime_error(std::string("cannot write lemma file: ") + std::strerror(errno));
        }
        done += static_cast<std::size_t>(n);
    }
    ::close(fd);
    return f;
}

constexpr std::size_t kOutputCap = 1 << 20;

ProverVerdict run_external(const ProverConfig &cfg, const std::filesystem::path &input, std::stop_token stop)
{
    const auto start = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

    std::string command;
    try {
        command = expand_template(cfg.command_template, input, cfg.timeout_s);
    } catch (const TemplateError &e) {
        return {VerdictKind::Error, e.what(), elapsed()};
    }

    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0)
        return {VerdictKind::Error, std::string("pipe: ") + std::strerror(errno), elapsed()};

    const char *argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        return {VerdictKind::Error, std::string("fork: ") + std::strerror(errno), elapsed()};
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(fds[1], STDOUT_FILENO);
        ::dup2(fds[1], STDERR_FILENO);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0)
            ::dup2(devnull, STDIN_FILENO);
        ::execv("/bin/sh", const_cast<char *const *>(argv));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(fds[1]);

    const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.timeout_s));
    std::string output;
    bool eof = false, exited = false, timed_out = false, cancelled = false;
    int status = 0;
    char buf[4096];

    while (!eof || !exited) {
        if (!exited) {
            pid_t r = ::waitpid(pid, &status, WNOHANG);
            if (r == pid)
                exited = true;
        }
        if (exited && !eof) {
            // Shell exited; kill descendants still holding the pipe.
            ::kill(-pid, SIGKILL);
        }
        if (stop.stop_requested()) {
            cancelled = true;
            break;
        }
        if (Clock::now() >= deadline) {
            timed_out = true;
            break;
        }
        if (eof) {
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
            continue;
        }
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        pollfd p{fds[0], POLLIN, 0};
        int rc = ::poll(&p, 1, static_cast<int>(std::clamp<long long>(remaining, 0, 50)));
        if (rc > 0) {
            ssize_t n = ::read(fds[0], buf, sizeof buf);
            if (n > 0) {
                if (output.size() < kOutputCap)
                    output.append(buf, static_cast<std::size_t>(std::min<std::size_t>(n, kOutputCap - output.size())));
            } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
                eof = true;
            }
        }
    }

    if (timed_out || cancelled) {
        ::kill(-pid, SIGKILL);
        if (!exited)
            ::waitpid(pid, &status, 0);
    }
    ::close(fds[0]);

    if (timed_out)
        return {VerdictKind::Timeout, "killed after " + format_seconds(cfg.timeout_s) + "s", elapsed()};
    if (cancelled)
        return {VerdictKind::Unknown, "cancelled after another prover succeeded", elapsed()};

    int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    ProverVerdict v = classify_output(output, code, cfg);
    v.elapsed_s = elapsed();
    return v;
}

} // namespace

std::string expand_template(const std::string &tmpl, const std::filesystem::path &input, double timeout_s)
{
    std::string out;
    for (std::size_t i = 0; i < tmpl.size();) {
        if (tmpl[i] == '{') {
            auto close = tmpl.find('}', i);
            if (close == std::string::npos)
                throw TemplateError("unterminated placeholder in '" + tmpl + "'");
            std::string key = tmpl.substr(i + 1, close - i - 1);
            if (key == "input")
                out += shell_quote(input.string());
            else if (key == "timeout_s")
                out += format_seconds(timeout_s);
            else
                throw TemplateError("unknown placeholder {" + key + "} in '" + tmpl + "'");
            i = close + 1;
        } else {
            out += tmpl[i++];
        }
    }
    return out;
}

ProverVerdict classify_output(const std::string &output, int exit_code, const ProverConfig &config)
{
    for (const auto &p : config.invalid_patterns)
        if (bounded_match(output, p))
            return {VerdictKind::Countermodel, "matched '" + p + "'", 0.0};
    for (const auto &p : config.valid_patterns)
        if (bounded_match(output, p))
            return {VerdictKind::Valid, "matched '" + p + "'", 0.0};
    if (exit_code != 0) {
        std::string tail = output.size() > 200 ? output.substr(output.size() - 200) : output;
        while (!tail.empty() && std::isspace(static_cast<unsigned char>(tail.back())))
            tail.pop_back();
        return {VerdictKind::Error, "exit code " + std::to_string(exit_code) + (tail.empty() ? "" : ": " + tail), 0.0};
    }
    return {VerdictKind::Unknown, "no pattern matched", 0.0};
}

PortfolioResult run_portfolio(const Lemma &lemma, const std::vector<ProverConfig> &registry,
                              const PortfolioOptions &options)
{
    std::vector<const ProverConfig *> active;
    for (const auto &p : registry)
        if (p.enabled)
            active.push_back(&p);
    if (active.empty())
        throw std::invalid_argument("no enabled prover in the registry");

    const auto start = Clock::now();
    const std::string text = export_lemma(lemma);
    PortfolioResult result;
    result.fingerprint = fingerprint(text);

    std::optional<TempFile> file;
    bool need_file = std::any_of(active.begin(), active.end(), [](const ProverConfig *p) { return !p->is_builtin(); });
    std::string file_error;
    if (need_file) {
        try {
            file.emplace(write_temp(text));
        } catch (const std::exception &e) {
            file_error = e.what();
        }
    }

    std::stop_source cancel;
    std::vector<ProverVerdict> verdicts(active.size());
    std::mutex mu;
    {
        std::vector<std::jthread> workers;
        workers.reserve(active.size());
        for (std::size_t i = 0; i < active.size(); ++i) {
            workers.emplace_back([&, i] {
                const ProverConfig &cfg = *active[i];
                ProverVerdict v;
                if (cfg.is_builtin()) {
                    auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                                       std::chrono::duration<double>(cfg.timeout_s));
                    v = builtin_prove(lemma, options.builtin_budget, deadline, cancel.get_token());
                } else if (!file) {
                    v = {VerdictKind::Error, file_error, 0.0};
                } else {
                    v = run_external(cfg, file->path, cancel.get_token());
                }
                if (v.kind == VerdictKind::Valid && options.stop_on_valid)
                    cancel.request_stop();
                std::lock_guard lock(mu);
                verdicts[i] = std::move(v);
            });
        }
    }

    for (std::size_t i = 0; i < active.size(); ++i) {
        result.overall_valid = result.overall_valid || verdicts[i].kind == VerdictKind::Valid;
        result.runs.push_back({active[i]->name, std::move(verdicts[i])});
    }
    result.wall_s = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

std::string summarize(const PortfolioResult &result)
{
    std::ostringstream os;
    os << "overall: " << (result.overall_valid ? "valid" : "not proved") << " (";
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        const auto &r = result.runs[i];
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.3fs", r.verdict.elapsed_s);
        os << (i ? "; " : "") << r.prover << ": " << to_string(r.verdict.kind) << " " << secs;
    }
    os << ")";
    return os.str();
}

} // namespace hypsel

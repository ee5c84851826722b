#pragma once

#include "hypsel/provers.hpp"
#include "hypsel/session.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

namespace hypsel {

/// Line-oriented front end over a Workbench. Accepts script lines plus the
/// inspection commands po, ctx, lex, hyp [context], lemma, script,
/// save-script <path>, help and quit.
class Repl {
public:
    Repl(std::shared_ptr<const PogFile> pog, std::vector<ProverConfig> registry, std::ostream &out,
         PortfolioOptions options = {});

    /// Handles one input line; false once the user asked to quit.
    bool handle_line(const std::string &line);

    /// Reads lines until quit or end of input. Returns the exit code.
    int run(std::istream &in, bool show_prompt);

    const Workbench &workbench() const { return wb_; }
    const std::optional<PortfolioResult> &last_proof() const { return last_proof_; }

private:
    void list_pos();
    void list_contexts();
    void list_lexicons();
    void list_hypotheses(const std::string &context);
    void print_lemma();
    void run_commands(const std::string &line);
    void flush_messages();

    Workbench wb_;
    std::vector<ProverConfig> registry_;
    PortfolioOptions options_;
    std::ostream &out_;
    std::size_t shown_messages_ = 0;
    std::optional<PortfolioResult> last_proof_;
};

} // namespace hypsel

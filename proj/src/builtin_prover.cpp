#include "hypsel/provers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace hypsel {

namespace {

using Clock = std::chrono::steady_clock;

// Propositional skeleton of a lemma. Nodes are stored children-first.
struct PropNode {
    enum Op : std::uint8_t { Atom, True, False, Not, And, Or, Implies, Iff } op;
    int a = -1;
    int b = -1;
    int atom = -1;
};

class Skeleton {
public:
    int add(const Formula &f)
    {
        if (const auto *b = f.as<BoolLit>())
            return push({b->value ? PropNode::True : PropNode::False});
        if (const auto *u = f.as<Unary>(); u && u->op == UnaryOp::Not)
            return push({PropNode::Not, add(u->operand)});
        if (const auto *bin = f.as<Binary>()) {
            PropNode::Op op;
            switch (bin->op) {
            case BinaryOp::And: op = PropNode::And; break;
            case BinaryOp::Or: op = PropNode::Or; break;
            case BinaryOp::Implies: op = PropNode::Implies; break;
            case BinaryOp::Iff: op = PropNode::Iff; break;
            default: return atom(f);
            }
            int l = add(bin->lhs);
            int r = add(bin->rhs);
            return push({op, l, r});
        }
        return atom(f);
    }

    void collect_atoms(int root, std::vector<bool> &seen) const
    {
        const PropNode &n = nodes[static_cast<std::size_t>(root)];
        if (n.op == PropNode::Atom)
            seen[static_cast<std::size_t>(n.atom)] = true;
        if (n.a >= 0)
            collect_atoms(n.a, seen);
        if (n.b >= 0)
            collect_atoms(n.b, seen);
    }

    std::vector<PropNode> nodes;
    std::vector<std::string> atom_keys;

private:
    int push(PropNode n)
    {
        nodes.push_back(n);
        return static_cast<int>(nodes.size()) - 1;
    }

    int atom(const Formula &f)
    {
        std::string key = print_formula(f);
        auto [it, fresh] = atom_index_.emplace(key, static_cast<int>(atom_keys.size()));
        if (fresh)
            atom_keys.push_back(std::move(key));
        PropNode n{PropNode::Atom};
        n.atom = it->second;
        return push(n);
    }

    std::unordered_map<std::string, int> atom_index_;
};

enum class Search { Refuted, Falsified, OutOfBudget, TimedOut, Stopped };

struct SearchResult {
    Search status;
    std::vector<bool> valuation; // atom values of a falsifying assignment
};

// Evaluates 64 valuations per pass: for atom i < 6 the lanes carry the
// low bits of the valuation number, higher atoms are constant per block.
SearchResult exhaustive(const Skeleton &sk, const std::vector<int> &hyps, int goal, Clock::time_point deadline,
                        const std::stop_token &stop)
{
    static constexpr std::uint64_t kLane[6] = {
        0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
        0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
    const std::size_t n = sk.atom_keys.size();
    const std::uint64_t lanes_used = n >= 6 ? ~0ull : ((1ull << (1u << n)) - 1);
    const std::uint64_t blocks = n > 6 ? (1ull << (n - 6)) : 1;
    std::vector<std::uint64_t> value(sk.nodes.size());

    for (std::uint64_t block = 0; block < blocks; ++block) {
        if ((block & 0xFF) == 0) {
            if (stop.stop_requested())
                return {Search::Stopped, {}};
            if (Clock::now() > deadline)
                return {Search::TimedOut, {}};
        }
        for (std::size_t i = 0; i < sk.nodes.size(); ++i) {
            const PropNode &nd = sk.nodes[i];
            std::uint64_t v = 0;
            switch (nd.op) {
            case PropNode::Atom:
                if (nd.atom < 6)
                    v = kLane[nd.atom];
                else
                    v = ((block >> (nd.atom - 6)) & 1) ? ~0ull : 0;
                break;
            case PropNode::True: v = ~0ull; break;
            case PropNode::False: v = 0; break;
            case PropNode::Not: v = ~value[static_cast<std::size_t>(nd.a)]; break;
            case PropNode::And: v = value[static_cast<std::size_t>(nd.a)] & value[static_cast<std::size_t>(nd.b)]; break;
            case PropNode::Or: v = value[static_cast<std::size_t>(nd.a)] | value[static_cast<std::size_t>(nd.b)]; break;
            case PropNode::Implies: v = ~value[static_cast<std::size_t>(nd.a)] | value[static_cast<std::size_t>(nd.b)]; break;
            case PropNode::Iff: v = ~(value[static_cast<std::size_t>(nd.a)] ^ value[static_cast<std::size_t>(nd.b)]); break;
            }
            value[i] = v;
        }
        std::uint64_t bad = lanes_used & ~value[static_cast<std::size_t>(goal)];
        for (int h : hyps)
            bad &= value[static_cast<std::size_t>(h)];
        if (bad) {
            unsigned lane = static_cast<unsigned>(__builtin_ctzll(bad));
            std::vector<bool> val(n);
            for (std::size_t a = 0; a < n; ++a)
                val[a] = a < 6 ? ((lane >> a) & 1) : ((block >> (a - 6)) & 1);
            return {Search::Falsified, std::move(val)};
        }
    }
    return {Search::Refuted, {}};
}

// Tseitin encoding of hyps & not goal, decided by DPLL with two watched
// literals and chronological backtracking.
class Dpll {
public:
    explicit Dpll(const Skeleton &sk) : sk_(sk)
    {
        n_atoms_ = static_cast<int>(sk.atom_keys.size());
        n_vars_ = n_atoms_ + 1; // last atom-range slot is the constant `true`
        true_var_ = n_atoms_;
        gate_.assign(sk.nodes.size(), 0);
        add_clause({lit(true_var_, true)});
    }

    void assert_true(int node)
    {
        const PropNode &n = sk_.nodes[static_cast<std::size_t>(node)];
        if (n.op == PropNode::And) {
            assert_true(n.a);
            assert_true(n.b);
        } else if (n.op == PropNode::Not) {
            assert_false(n.a);
        } else {
            add_clause({encode(node)});
        }
    }

    void assert_false(int node)
    {
        const PropNode &n = sk_.nodes[static_cast<std::size_t>(node)];
        if (n.op == PropNode::Or) {
            assert_false(n.a);
            assert_false(n.b);
        } else if (n.op == PropNode::Implies) {
            assert_true(n.a);
            assert_false(n.b);
        } else if (n.op == PropNode::Not) {
            assert_true(n.a);
        } else {
            add_clause({neg(encode(node))});
        }
    }

    SearchResult solve(std::size_t budget, Clock::time_point deadline, const std::stop_token &stop)
    {
        value_.assign(static_cast<std::size_t>(n_vars_), 0);
        watches_.assign(static_cast<std::size_t>(2 * n_vars_), {});
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
            auto &c = clauses_[ci];
            if (c.empty())
                return {Search::Refuted, {}};
            if (c.size() == 1) {
                units_.push_back(c[0]);
                continue;
            }
            watches_[static_cast<std::size_t>(c[0])].push_back(ci);
            watches_[static_cast<std::size_t>(c[1])].push_back(ci);
        }
        for (int u : units_) {
            if (is_false(u))
                return {Search::Refuted, {}};
            if (!is_true(u))
                assign(u);
        }
        if (!propagate())
            return {Search::Refuted, {}};

        std::size_t steps = 0;
        int cursor = 0;
        for (;;) {
            // Pick the next unassigned variable, atoms first.
            while (cursor < n_vars_ && value_[static_cast<std::size_t>(cursor)] != 0)
                ++cursor;
            if (cursor == n_vars_) {
                std::vector<bool> val(static_cast<std::size_t>(n_atoms_));
                for (int a = 0; a < n_atoms_; ++a)
                    val[static_cast<std::size_t>(a)] = value_[static_cast<std::size_t>(a)] > 0;
                return {Search::Falsified, std::move(val)};
            }
            if (++steps > budget)
                return {Search::OutOfBudget, {}};
            if ((steps & 0x3FF) == 0) {
                if (stop.stop_requested())
                    return {Search::Stopped, {}};
                if (Clock::now() > deadline)
                    return {Search::TimedOut, {}};
            }
            levels_.push_back({trail_.size(), lit(cursor, false), false});
            assign(lit(cursor, false));
            while (!propagate()) {
                // Undo to the most recent unflipped decision and flip it.
                while (!levels_.empty() && levels_.back().flipped) {
                    undo_to(levels_.back().trail_size);
                    levels_.pop_back();
                }
                if (levels_.empty())
                    return {Search::Refuted, {}};
                if (++steps > budget)
                    return {Search::OutOfBudget, {}};
                Level &top = levels_.back();
                undo_to(top.trail_size);
                top.flipped = true;
                assign(neg(top.decision));
            }
            cursor = 0;
        }
    }

private:
    struct Level {
        std::size_t trail_size;
        int decision;
        bool flipped;
    };

    // Literal encoding: 2*var + (negative ? 1 : 0).
    static int lit(int var, bool positive) { return 2 * var + (positive ? 0 : 1); }
    static int neg(int l) { return l ^ 1; }
    static int var_of(int l) { return l >> 1; }

    bool is_true(int l) const
    {
        int v = value_[static_cast<std::size_t>(var_of(l))];
        return (l & 1) ? v < 0 : v > 0;
    }
    bool is_false(int l) const
    {
        int v = value_[static_cast<std::size_t>(var_of(l))];
        return (l & 1) ? v > 0 : v < 0;
    }

    void assign(int l)
    {
        value_[static_cast<std::size_t>(var_of(l))] = (l & 1) ? -1 : 1;
        trail_.push_back(l);
    }

    void undo_to(std::size_t size)
    {
        while (trail_.size() > size) {
            value_[static_cast<std::size_t>(var_of(trail_.back()))] = 0;
            trail_.pop_back();
        }
        head_ = std::min(head_, size);
    }

    bool propagate()
    {
        while (head_ < trail_.size()) {
            int falsified = neg(trail_[head_++]);
            auto &ws = watches_[static_cast<std::size_t>(falsified)];
            std::size_t keep = 0;
            for (std::size_t k = 0; k < ws.size(); ++k) {
                std::size_t ci = ws[k];
                auto &c = clauses_[ci];
                if (c[0] == falsified)
                    std::swap(c[0], c[1]);
                if (is_true(c[0])) {
                    ws[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::size_t j = 2; j < c.size(); ++j) {
                    if (!is_false(c[j])) {
                        std::swap(c[1], c[j]);
                        watches_[static_cast<std::size_t>(c[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                }
                if (moved)
                    continue;
                ws[keep++] = ci;
                if (is_false(c[0])) {
                    for (std::size_t r = k + 1; r < ws.size(); ++r)
                        ws[keep++] = ws[r];
                    ws.resize(keep);
                    return false;
                }
                if (!is_true(c[0]))
                    assign(c[0]);
            }
            ws.resize(keep);
        }
        return true;
    }

    int fresh()
    {
        return n_vars_++;
    }

    void add_clause(std::vector<int> c)
    {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        for (std::size_t i = 1; i < c.size(); ++i)
            if (c[i] == neg(c[i - 1]) && var_of(c[i]) == var_of(c[i - 1]))
                return; // tautological
        clauses_.push_back(std::move(c));
    }

    int encode(int node)
    {
        const PropNode &n = sk_.nodes[static_cast<std::size_t>(node)];
        switch (n.op) {
        case PropNode::Atom: return lit(n.atom, true);
        case PropNode::True: return lit(true_var_, true);
        case PropNode::False: return lit(true_var_, false);
        case PropNode::Not: return neg(encode(n.a));
        default: break;
        }
        if (gate_[static_cast<std::size_t>(node)])
            return gate_[static_cast<std::size_t>(node)] - 1;
        int a = encode(n.a);
        int b = encode(n.b);
        int g = lit(fresh(), true);
        switch (n.op) {
        case PropNode::And:
            add_clause({neg(g), a});
            add_clause({neg(g), b});
            add_clause({g, neg(a), neg(b)});
            break;
        case PropNode::Or:
            add_clause({g, neg(a)});
            add_clause({g, neg(b)});
            add_clause({neg(g), a, b});
            break;
        case PropNode::Implies:
            add_clause({g, a});
            add_clause({g, neg(b)});
            add_clause({neg(g), neg(a), b});
            break;
        case PropNode::Iff:
            add_clause({neg(g), neg(a), b});
            add_clause({neg(g), a, neg(b)});
            add_clause({g, a, b});
            add_clause({g, neg(a), neg(b)});
            break;
        default: break;
        }
        gate_[static_cast<std::size_t>(node)] = g + 1;
        return g;
    }

    const Skeleton &sk_;
    int n_atoms_;
    int n_vars_;
    int true_var_;
    std::vector<int> gate_;
    std::vector<std::vector<int>> clauses_;
    std::vector<int> units_;
    std::vector<std::vector<std::size_t>> watches_;
    std::vector<int> value_;
    std::vector<int> trail_;
    std::size_t head_ = 0;
    std::vector<Level> levels_;
};

std::string describe_valuation(const Skeleton &sk, const std::vector<bool> &val)
{
    std::string out = "falsified by";
    std::size_t shown = 0;
    for (std::size_t a = 0; a < val.size() && shown < 8; ++a, ++shown)
        out += (shown ? ", " : " ") + sk.atom_keys[a] + " := " + (val[a] ? "true" : "false");
    if (val.size() > 8)
        out += ", ...";
    return out;
}

} // namespace

ProverVerdict builtin_prove(const Lemma &lemma, std::size_t step_budget)
{
    return builtin_prove(lemma, step_budget, Clock::time_point::max(), std::stop_token{});
}

ProverVerdict builtin_prove(const Lemma &lemma, std::size_t step_budget, Clock::time_point deadline,
                            std::stop_token stop)
{
    const auto start = Clock::now();
    auto finish = [&](VerdictKind kind, std::string msg) {
        return ProverVerdict{kind, std::move(msg), std::chrono::duration<double>(Clock::now() - start).count()};
    };
    if (step_budget < 1)
        return finish(VerdictKind::Error, "step budget must be at least 1");

    Skeleton sk;
    std::vector<int> hyps;
    hyps.reserve(lemma.hypotheses.size());
    for (const auto &h : lemma.hypotheses)
        hyps.push_back(sk.add(h.formula));
    const int goal = sk.add(lemma.goal);
    const std::size_t n_atoms = sk.atom_keys.size();

    // Exhaustive sweep when the valuation space times formula size is small;
    // otherwise the splitting search (same answers, bounded by the budget).
    const double work = n_atoms <= kExhaustiveAtomLimit
                            ? static_cast<double>(sk.nodes.size()) * std::ldexp(1.0, static_cast<int>(n_atoms)) / 64.0
                            : 1e300;
    SearchResult r;
    if (work <= 5e7) {
        r = exhaustive(sk, hyps, goal, deadline, stop);
    } else {
        Dpll solver(sk);
        for (int h : hyps)
            solver.assert_true(h);
        solver.assert_false(goal);
        r = solver.solve(step_budget, deadline, stop);
    }

    switch (r.status) {
    case Search::Refuted:
        return finish(VerdictKind::Valid, "propositional tautology over " + std::to_string(n_atoms) + " atoms");
    case Search::OutOfBudget:
        return finish(VerdictKind::Unknown, "step budget exhausted");
    case Search::TimedOut:
        return finish(VerdictKind::Timeout, "time limit reached");
    case Search::Stopped:
        return finish(VerdictKind::Unknown, "cancelled");
    case Search::Falsified:
        break;
    }

    std::vector<bool> in_hyps(n_atoms), in_goal(n_atoms);
    for (int h : hyps)
        sk.collect_atoms(h, in_hyps);
    sk.collect_atoms(goal, in_goal);
    for (std::size_t a = 0; a < n_atoms; ++a)
        if (in_goal[a] && !in_hyps[a])
            return finish(VerdictKind::Unknown, "goal atom '" + sk.atom_keys[a] + "' is not constrained by any hypothesis");
    return finish(VerdictKind::Countermodel, describe_valuation(sk, r.valuation));
}

} // namespace hypsel

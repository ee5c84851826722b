#include "hypsel/pomodel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace hypsel {

namespace {

// Portable draws over mt19937_64.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

    template <class T>
    void shuffle(std::vector<T> &v)
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 rng_;
};

constexpr std::array<std::pair<OriginTag, unsigned>, kOriginTagCount> kOriginWeights = {{
    {OriginTag::Constraints, 2},
    {OriginTag::AbstractProperties, 10},
    {OriginTag::Properties, 14},
    {OriginTag::SeenProperties, 22},
    {OriginTag::IncludedProperties, 9},
    {OriginTag::IncludedInvariants, 8},
    {OriginTag::SeenInvariants, 12},
    {OriginTag::Invariants, 12},
    {OriginTag::AbstractPrecondition, 4},
    {OriginTag::Local, 3},
    {OriginTag::BDefinitions, 4},
}};

OriginTag draw_origin(Draw &draw)
{
    unsigned total = 0;
    for (const auto &[tag, w] : kOriginWeights)
        total += w;
    std::size_t pick = draw.below(total);
    for (const auto &[tag, w] : kOriginWeights) {
        if (pick < w)
            return tag;
        pick -= w;
    }
    return OriginTag::Properties;
}

PoGroup group_for(std::size_t i)
{
    if (i % 13 == 12)
        return PoGroup::WellDefinedness;
    if (i % 11 == 10)
        return PoGroup::Assertions;
    if (i % 7 == 6)
        return PoGroup::Initialization;
    return PoGroup::Operations;
}

struct Draft {
    std::string text;
    OriginTag origin;
    std::optional<std::string> typing;
    bool planted;
};

std::string relevant_atom(std::size_t j)
{
    return "g + v" + std::to_string(j) + " > 0";
}

Draft noise_hypothesis(Draw &draw, std::size_t pool, std::size_t sets)
{
    auto n = [&] { return "n" + std::to_string(draw.below(pool)); };
    auto t = [&] { return "T" + std::to_string(draw.below(sets)); };
    Draft d{"", draw_origin(draw), std::nullopt, false};
    switch (draw.below(9)) {
    case 0: {
        std::string a = n();
        d.text = a + " : NAT";
        d.typing = a + ":NAT";
        break;
    }
    case 1: d.text = n() + " = " + n() + " + " + std::to_string(draw.below(100)); break;
    case 2: d.text = n() + " <= " + n(); break;
    case 3: d.text = "!x.(x : " + t() + " => x <= " + n() + ")"; break;
    case 4: d.text = n() + " : " + t(); break;
    case 5: d.text = "f" + std::to_string(draw.below(sets)) + "(" + n() + ") = " + n(); break;
    case 6: d.text = n() + " |-> " + n() + " : " + t(); break;
    case 7: d.text = n() + " > 0 => " + n() + " > 0"; break;
    default: d.text = "#y.(y : " + t() + " & y > " + n() + ")"; break;
    }
    return d;
}

ProofObligation synthesize(Draw &draw, std::size_t index, const SyntheticParams &p)
{
    std::size_t planted = static_cast<std::size_t>(std::ceil(p.relevant_fraction * static_cast<double>(p.n_hyps)));
    planted = std::clamp<std::size_t>(planted, 1, p.n_hyps);
    std::size_t noise = p.n_hyps - planted;
    std::size_t pool = std::max<std::size_t>(4, noise / 2);
    std::size_t sets = std::max<std::size_t>(2, pool / 8);

    // Planted chain: A0, A0 => A1, not A2 => not A1, ... ; goal A(k-1).
    // Every link mentions `g`, which also occurs in the goal; A0 is local.
    std::vector<Draft> drafts;
    drafts.reserve(p.n_hyps);
    for (std::size_t j = 0; j < planted; ++j) {
        Draft d{"", j == 0 ? OriginTag::Local : draw_origin(draw), std::nullopt, true};
        if (j == 0)
            d.text = relevant_atom(0);
        else if (j % 2 == 1)
            d.text = relevant_atom(j - 1) + " => " + relevant_atom(j);
        else
            d.text = "not " + relevant_atom(j) + " => not " + relevant_atom(j - 1);
        drafts.push_back(std::move(d));
    }
    for (std::size_t j = 0; j < noise; ++j)
        drafts.push_back(noise_hypothesis(draw, pool, sets));
    draw.shuffle(drafts);

    ProofObligation po;
    po.name = "syn." + std::to_string(index + 1);
    po.group = group_for(index);
    po.goal = parse_formula(relevant_atom(planted - 1));
    std::vector<std::string> planted_ids;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        Hypothesis h{"h" + std::to_string(i + 1), drafts[i].origin, parse_formula(drafts[i].text), drafts[i].typing};
        if (drafts[i].planted)
            planted_ids.push_back(h.id);
        po.hypotheses.push_back(std::move(h));
    }
    po.planted = std::move(planted_ids);
    return po;
}

} // namespace

PogFile generate_synthetic(const SyntheticParams &params)
{
    if (params.n_pos < 1)
        throw std::invalid_argument("n_pos must be at least 1");
    if (params.n_hyps < 1)
        throw std::invalid_argument("n_hyps must be at least 1");
    if (!(params.relevant_fraction > 0.0 && params.relevant_fraction <= 1.0))
        throw std::invalid_argument("relevant_fraction must lie in (0, 1]");

    Draw draw(params.seed);
    PogFile pog;
    pog.component_name = "SYNTH_" + std::to_string(params.seed);
    pog.pos.reserve(params.n_pos);
    for (std::size_t i = 0; i < params.n_pos; ++i)
        pog.pos.push_back(synthesize(draw, i, params));
    return pog;
}

} // namespace hypsel

#include "hypsel/pomodel.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace hypsel {

namespace pt = boost::property_tree;

namespace {

constexpr std::array<std::string_view, kOriginTagCount> kOriginNames = {
    "constraints",         "abstract_properties", "properties",           "seen_properties",
    "included_properties", "included_invariants", "seen_invariants",      "invariants",
    "abstract_precondition", "local",             "b_definitions",
};

constexpr std::array<std::string_view, 4> kGroupNames = {
    "assertions", "initialization", "operations", "well_definedness"};

bool is_hyp_id(std::string_view id)
{
    if (id.empty() || id == "Some" || id == "All")
        return false;
    return std::all_of(id.begin(), id.end(), [](char c) { return lex::is_ident_char(c) || c == '.'; });
}

} // namespace

std::string_view to_string(OriginTag tag)
{
    return kOriginNames[static_cast<std::size_t>(tag)];
}

std::optional<OriginTag> parse_origin(std::string_view text)
{
    for (std::size_t i = 0; i < kOriginNames.size(); ++i)
        if (kOriginNames[i] == text)
            return static_cast<OriginTag>(i);
    return std::nullopt;
}

std::string_view to_string(PoGroup group)
{
    return kGroupNames[static_cast<std::size_t>(group)];
}

std::optional<PoGroup> parse_group(std::string_view text)
{
    for (std::size_t i = 0; i < kGroupNames.size(); ++i)
        if (kGroupNames[i] == text)
            return static_cast<PoGroup>(i);
    return std::nullopt;
}

std::optional<std::size_t> ProofObligation::find(std::string_view id) const
{
    for (std::size_t i = 0; i < hypotheses.size(); ++i)
        if (hypotheses[i].id == id)
            return i;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// HypSet

HypSet::HypSet(std::vector<std::uint32_t> indices) : items_(std::move(indices))
{
    std::sort(items_.begin(), items_.end());
    items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

HypSet HypSet::range(std::size_t n)
{
    HypSet s;
    s.items_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.items_[i] = static_cast<std::uint32_t>(i);
    return s;
}

bool HypSet::contains(std::uint32_t i) const
{
    return std::binary_search(items_.begin(), items_.end(), i);
}

HypSet HypSet::united(const HypSet &other) const
{
    HypSet out;
    out.items_.reserve(items_.size() + other.items_.size());
    std::set_union(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                   std::back_inserter(out.items_));
    return out;
}

HypSet HypSet::minus(const HypSet &other) const
{
    HypSet out;
    std::set_difference(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                        std::back_inserter(out.items_));
    return out;
}

HypSet HypSet::intersected(const HypSet &other) const
{
    HypSet out;
    std::set_intersection(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                          std::back_inserter(out.items_));
    return out;
}

bool HypSet::subset_of(const HypSet &other) const
{
    return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
}

// ---------------------------------------------------------------------------
// Pre-defined entities

std::vector<Context> predefined_contexts(const ProofObligation &po)
{
    std::array<std::vector<std::uint32_t>, kOriginTagCount> by_tag;
    for (std::size_t i = 0; i < po.hypotheses.size(); ++i)
        by_tag[static_cast<std::size_t>(po.hypotheses[i].origin)].push_back(static_cast<std::uint32_t>(i));

    HypSet all = HypSet::range(po.hypotheses.size());
    HypSet local(by_tag[static_cast<std::size_t>(OriginTag::Local)]);
    std::vector<Context> out;
    out.push_back({"all", all, true});
    out.push_back({"local", local, true});
    out.push_back({"global", all.minus(local), true});
    for (std::size_t t = 0; t < kOriginTagCount; ++t) {
        if (static_cast<OriginTag>(t) == OriginTag::Local || by_tag[t].empty())
            continue;
        out.push_back({std::string(kOriginNames[t]), HypSet(std::move(by_tag[t])), true});
    }
    return out;
}

Lexicon goal_lexicon(const ProofObligation &po)
{
    return {"goal", free_identifiers(po.goal), true};
}

// ---------------------------------------------------------------------------
// Validation

void validate(const PogFile &pog)
{
    std::unordered_set<std::string> names;
    for (const auto &po : pog.pos) {
        if (po.name.empty())
            throw PogError("proof obligation with empty name");
        if (!names.insert(po.name).second)
            throw PogError("duplicate proof obligation name '" + po.name + "'");
        std::unordered_set<std::string> ids;
        for (const auto &h : po.hypotheses) {
            if (!is_hyp_id(h.id))
                throw PogError("PO '" + po.name + "': invalid hypothesis id '" + h.id + "'");
            if (!ids.insert(h.id).second)
                throw PogError("PO '" + po.name + "': duplicate hypothesis id '" + h.id + "'");
        }
        if (po.planted)
            for (const auto &id : *po.planted)
                if (!ids.count(id))
                    throw PogError("PO '" + po.name + "': planted id '" + id + "' is not a hypothesis");
    }
}

// ---------------------------------------------------------------------------
// Reading

namespace {

using Attrs = std::vector<std::pair<std::string, std::string>>;

Attrs attributes(const pt::ptree &node)
{
    Attrs out;
    if (auto a = node.get_child_optional("<xmlattr>"))
        for (const auto &[k, v] : *a)
            out.emplace_back(k, v.data());
    return out;
}

void check_attributes(const Attrs &attrs, std::initializer_list<std::string_view> allowed, const std::string &where)
{
    for (const auto &[k, v] : attrs)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw PogError(where + ": unknown attribute '" + k + "'");
}

std::optional<std::string> attr(const Attrs &attrs, std::string_view key)
{
    for (const auto &[k, v] : attrs)
        if (k == key)
            return v;
    return std::nullopt;
}

std::string require_attr(const Attrs &attrs, std::string_view key, const std::string &where)
{
    auto v = attr(attrs, key);
    if (!v)
        throw PogError(where + ": missing attribute '" + std::string(key) + "'");
    return *v;
}

bool only_whitespace(const std::string &s)
{
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

Formula parse_in(const std::string &text, const std::string &where)
{
    try {
        return parse_formula(text);
    } catch (const SyntaxError &e) {
        throw PogError(where + ": " + e.what());
    }
}

ProofObligation read_po(const pt::ptree &node)
{
    Attrs attrs = attributes(node);
    ProofObligation po;
    po.name = require_attr(attrs, "name", "<po>");
    std::string where = "PO '" + po.name + "'";
    check_attributes(attrs, {"name", "group"}, where);
    std::string group = require_attr(attrs, "group", where);
    auto g = parse_group(group);
    if (!g)
        throw PogError(where + ": unknown group '" + group + "'");
    po.group = *g;

    bool have_goal = false;
    for (const auto &[tag, child] : node) {
        if (tag == "<xmlattr>" || tag == "<xmlcomment>")
            continue;
        Attrs ca = attributes(child);
        if (tag == "hyp") {
            Hypothesis h{require_attr(ca, "id", where + " <hyp>"), OriginTag::Local, Formula::boolean(true), {}};
            std::string hwhere = where + " hypothesis '" + h.id + "'";
            check_attributes(ca, {"id", "origin", "typing"}, hwhere);
            std::string origin = require_attr(ca, "origin", hwhere);
            auto o = parse_origin(origin);
            if (!o)
                throw PogError(hwhere + ": unknown origin tag '" + origin + "'");
            h.origin = *o;
            h.typing = attr(ca, "typing");
            h.formula = parse_in(child.data(), hwhere);
            po.hypotheses.push_back(std::move(h));
        } else if (tag == "goal") {
            if (have_goal)
                throw PogError(where + ": more than one <goal>");
            check_attributes(ca, {}, where + " <goal>");
            po.goal = parse_in(child.data(), where + " goal");
            have_goal = true;
        } else if (tag == "planted") {
            check_attributes(ca, {"ids"}, where + " <planted>");
            std::istringstream ids(require_attr(ca, "ids", where + " <planted>"));
            std::vector<std::string> planted;
            for (std::string id; ids >> id;)
                planted.push_back(id);
            po.planted = std::move(planted);
        } else {
            throw PogError(where + ": unexpected element <" + tag + ">");
        }
    }
    if (!have_goal)
        throw PogError(where + ": missing <goal>");
    return po;
}

} // namespace

PogFile parse_pog(std::string_view xml)
{
    pt::ptree tree;
    std::istringstream in{std::string(xml)};
    try {
        pt::read_xml(in, tree, pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error &e) {
        throw PogError("malformed XML at line " + std::to_string(e.line()) + ": " + e.message());
    }

    const pt::ptree *root = nullptr;
    for (const auto &[tag, child] : tree) {
        if (tag == "pog" && !root)
            root = &child;
        else
            throw PogError("expected a single <pog> root element, found <" + tag + ">");
    }
    if (!root)
        throw PogError("missing <pog> root element");

    PogFile pog;
    Attrs attrs = attributes(*root);
    check_attributes(attrs, {"component"}, "<pog>");
    pog.component_name = require_attr(attrs, "component", "<pog>");
    if (!only_whitespace(root->data()))
        throw PogError("<pog>: unexpected text content");
    for (const auto &[tag, child] : *root) {
        if (tag == "<xmlattr>")
            continue;
        if (tag != "po")
            throw PogError("<pog>: unexpected element <" + tag + ">");
        pog.pos.push_back(read_po(child));
    }
    validate(pog);
    return pog;
}

PogFile load_pog(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw PogError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw PogError("read error on '" + path.string() + "'");
    return parse_pog(buf.str());
}

// ---------------------------------------------------------------------------
// Writing

namespace {

void escape_into(std::string &out, std::string_view text, bool attribute)
{
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"':
            if (attribute) {
                out += "&quot;";
                break;
            }
            [[fallthrough]];
        default: out += c;
        }
    }
}

void put_attr(std::string &out, std::string_view key, std::string_view value)
{
    out += ' ';
    out += key;
    out += "=\"";
    escape_into(out, value, true);
    out += '"';
}

} // namespace

std::string write_pog(const PogFile &pog)
{
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<pog";
    put_attr(out, "component", pog.component_name);
    out += ">\n";
    for (const auto &po : pog.pos) {
        out += "  <po";
        put_attr(out, "name", po.name);
        put_attr(out, "group", to_string(po.group));
        out += ">\n";
        for (const auto &h : po.hypotheses) {
            out += "    <hyp";
            put_attr(out, "id", h.id);
            put_attr(out, "origin", to_string(h.origin));
            if (h.typing)
                put_attr(out, "typing", *h.typing);
            out += '>';
            escape_into(out, print_formula(h.formula), false);
            out += "</hyp>\n";
        }
        out += "    <goal>";
        escape_into(out, print_formula(po.goal), false);
        out += "</goal>\n";
        if (po.planted) {
            std::string ids;
            for (const auto &id : *po.planted)
                ids += (ids.empty() ? "" : " ") + id;
            out += "    <planted";
            put_attr(out, "ids", ids);
            out += "/>\n";
        }
        out += "  </po>\n";
    }
    out += "</pog>\n";
    return out;
}

void save_pog(const PogFile &pog, const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw PogError("cannot write '" + path.string() + "'");
    out << write_pog(pog);
    out.flush();
    if (!out)
        throw PogError("write error on '" + path.string() + "'");
}

} // namespace hypsel

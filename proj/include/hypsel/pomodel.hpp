#pragma once

// Proof obligations with origin-tagged hypotheses, the pog XML dialect and
// the pre-defined contexts/lexicon derived from a single obligation.

#include "hypsel/formula.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hypsel {

/// One tag per clause of the refinement proof obligation template, plus
/// `local` for operation-local conditions and `b_definitions` for
/// hypotheses on pre-defined sets.
enum class OriginTag : std::uint8_t {
    Constraints,
    AbstractProperties,
    Properties,
    SeenProperties,
    IncludedProperties,
    IncludedInvariants,
    SeenInvariants,
    Invariants,
    AbstractPrecondition,
    Local,
    BDefinitions,
};

inline constexpr std::size_t kOriginTagCount = 11;

std::string_view to_string(OriginTag tag);
std::optional<OriginTag> parse_origin(std::string_view text);

enum class PoGroup : std::uint8_t { Assertions, Initialization, Operations, WellDefinedness };

std::string_view to_string(PoGroup group);
std::optional<PoGroup> parse_group(std::string_view text);

struct Hypothesis {
    std::string id;
    OriginTag origin;
    Formula formula;
    std::optional<std::string> typing;

    bool operator==(const Hypothesis &) const = default;
};

struct ProofObligation {
    std::string name;
    PoGroup group = PoGroup::Operations;
    std::vector<Hypothesis> hypotheses;
    Formula goal = Formula::boolean(true);
    /// Ids of the hypotheses a synthetic generator planted as sufficient.
    std::optional<std::vector<std::string>> planted;

    bool operator==(const ProofObligation &) const = default;

    /// Index of the hypothesis with `id`, if any. Linear scan.
    std::optional<std::size_t> find(std::string_view id) const;
};

struct PogFile {
    std::string component_name;
    std::vector<ProofObligation> pos;

    bool operator==(const PogFile &) const = default;
};

/// Load or validation failure; `what()` names the offending PO/hypothesis.
class PogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sorted set of hypothesis positions within one obligation's Γ.
class HypSet {
public:
    HypSet() = default;
    explicit HypSet(std::vector<std::uint32_t> indices);
    static HypSet range(std::size_t n);

    bool contains(std::uint32_t i) const;
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const std::vector<std::uint32_t> &items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    HypSet united(const HypSet &other) const;
    HypSet minus(const HypSet &other) const;
    HypSet intersected(const HypSet &other) const;
    bool subset_of(const HypSet &other) const;

    bool operator==(const HypSet &) const = default;

private:
    std::vector<std::uint32_t> items_;
};

struct Context {
    std::string name;
    HypSet members;
    bool predefined = false;

    bool operator==(const Context &) const = default;
};

struct Lexicon {
    std::string name;
    IdentSet ids;
    bool predefined = false;

    bool operator==(const Lexicon &) const = default;
};

/// `all`, `local`, `global`, then one context per non-empty origin tag
/// (other than `local`) in tag order.
std::vector<Context> predefined_contexts(const ProofObligation &po);

/// The `goal` lexicon: free identifiers of the goal.
Lexicon goal_lexicon(const ProofObligation &po);

PogFile parse_pog(std::string_view xml);
std::string write_pog(const PogFile &pog);

PogFile load_pog(const std::filesystem::path &path);
void save_pog(const PogFile &pog, const std::filesystem::path &path);

/// Throws PogError if names/ids are not unique or planted ids dangle.
void validate(const PogFile &pog);

/// Parameters for generate_synthetic.
struct SyntheticParams {
    std::size_t n_pos = 1;
    std::size_t n_hyps = 1;
    double relevant_fraction = 0.1;
    std::uint64_t seed = 0;
};

/// Corpus whose goals follow from a planted subset (recorded on each PO)
/// of ceil(relevant_fraction * n_hyps) hypotheses; throws std::invalid_argument
/// on bad parameters.
PogFile generate_synthetic(const SyntheticParams &params);

} // namespace hypsel

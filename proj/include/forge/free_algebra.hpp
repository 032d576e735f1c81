#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "forge/theory.hpp"

namespace forge {

inline constexpr std::size_t kDefaultTermBudget = 200000;

// All terms over sig and gens of height <= depth. Level h lists the
// generators, then for each operation in signature order its applications to
// every tuple of level h-1 terms (odometer order). Throws BudgetExceeded when
// more than `budget` terms would be produced.
std::vector<Term> enumerate_terms(const Signature& sig, const std::vector<std::string>& gens, std::size_t depth,
                                  std::size_t budget = kDefaultTermBudget);

struct QuotientClass {
    Term repr;            // least term of minimal height
    std::size_t level;    // minimal height of a member
    std::uint64_t size;   // members of height <= depth, saturating
};

// Terms over the generators of height <= depth, modulo the equations of the
// theory as far as they can be derived among those terms.
class QuotientAlgebra {
public:
    using TableKey = std::pair<std::size_t, std::vector<std::size_t>>;  // (op index, argument classes)

    std::string theory;
    Signature signature;
    std::vector<std::string> generators;
    std::size_t requestedDepth = 0;
    std::size_t depth = 0;  // depth actually reached
    bool closed = false;
    bool capped = false;    // the budget stopped construction before requestedDepth
    std::size_t nodeCount = 0;
    std::vector<QuotientClass> classes;
    std::vector<std::size_t> classCountByDepth;  // class count after each completed depth
    std::map<TableKey, std::size_t> opTable;
    std::map<std::string, std::size_t> generatorClass;

    std::size_t class_count() const { return classes.size(); }

    // Class of an enumerated term; nullopt when the term is taller than the
    // construction or mentions a foreign generator.
    std::optional<std::size_t> class_of(const Term& t) const;
    std::optional<std::size_t> apply(std::size_t op, const std::vector<std::size_t>& args) const;
};

// Report form, schema version 1:
//   {schema, theory, generators, depth, requestedDepth, closed, capped,
//    classCount, classCountByDepth, classes:[{repr, size}],
//    opTable:[{op, args:[class], result}] (first opSample entries)}
nlohmann::json quotient_to_json(const QuotientAlgebra& q, std::size_t opSample = 32);

// Builds the quotient depth by depth. When the budget (e-nodes) would be
// exceeded the result stops at the last complete depth with capped = true.
QuotientAlgebra free_algebra(const Theory& t, const std::vector<std::string>& gens, std::size_t depth,
                             std::size_t budget = kDefaultTermBudget);

struct PhaseStep {
    std::size_t round = 0;
    std::size_t phase = 0;
    bool grew = false;  // the phase added at least one node
    std::size_t classes = 0;
};

struct PhasedClosure {
    QuotientAlgebra algebra;
    std::vector<PhaseStep> phaseLog;
    std::size_t rounds = 0;
    bool fixpoint = false;  // a whole round added nothing
    bool capped = false;
};

// Starts from the generators and constants, then repeatedly closes under each
// phase's operations in turn (applying them to all classes until nothing new
// appears), re-saturating by every equation after each pass. Stops after a
// round in which no phase added a node, or after maxRounds.
PhasedClosure close_in_phases(const Theory& t, const std::vector<std::string>& gens,
                              const std::vector<std::vector<std::string>>& phases, std::size_t maxRounds,
                              std::size_t budget = kDefaultTermBudget);

enum class Decision { Equal, Unknown };

// Equal when both terms land in one class of the free algebra over their
// joint variables at max(depth, term heights). Never claims inequality.
Decision decide_equal(const Theory& t, const Term& a, const Term& b, std::size_t depth,
                      std::size_t budget = kDefaultTermBudget);

}  // namespace forge

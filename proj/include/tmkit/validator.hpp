#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tmkit/core_model.hpp"
#include "tmkit/diagnostic.hpp"
#include "tmkit/dsl.hpp"

namespace tmkit {

struct ValidationReport {
    std::vector<Diagnostic> diagnostics;  // ordered by (rule, declaration order)
    bool ok = true;                       // no Error diagnostics
};

struct ValidateOptions {
    bool strict = false;  // V1 and V3 become errors
};

// Well-formedness rules:
//   V1 (warning) a thimac that flows (receives via an incoming flow, or
//      releases into an outgoing flow) has a Create node or a Transfer-in
//      from another thimac.
//   V2 (error)   every flow arc obeys the adjacency table.
//   V3 (warning) trigger between two actions of the same thimac.
//   V4 (error)   every event region is non-empty, closed, and connected.
//   V5 (error)   containment is a forest.
//   V6 (error)   event ids are unique and instance regions hold a Create.
// `spans` (from parse_model) locates findings; without it spans name the model.
ValidationReport validate(const StaticModel& model, const ValidateOptions& options = {},
                          const SourceMap* spans = nullptr);

class RegionBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultRegionCap = 200000;

// Every connected induced subdiagram with at most `max_nodes` nodes, sorted
// lexicographically by node ids. Connectivity uses flow and trigger arcs with
// direction ignored. Throws std::invalid_argument when max_nodes < 1 and
// RegionBudgetExceeded when more than `cap` regions exist.
std::vector<Region> enumerate_regions(const StaticModel& model, int max_nodes,
                                      std::size_t cap = kDefaultRegionCap);

// True when the region's own arcs connect all of its nodes.
bool region_connected(const Region& region, const StaticModel& model);

}  // namespace tmkit

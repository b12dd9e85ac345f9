// Named Toda solutions with sampling boxes: closed forms and implicit
// polynomial branches, each carrying its epsilon and a provenance note.

#pragma once

#include "tg/toda.hpp"

namespace tg {

struct TodaCatalogEntry {
    std::string name;
    double epsilon = 1.0;
    Chart box;                      // 3D region in (X, Y, Z)
    ScalarField u;                  // U(X, Y, Z); implicit entries track the branch
    bool implicit = false;
    ImplicitTodaSolution relation;  // set when implicit
    bool expect_pass = true;        // false: kept for honest reporting only
    std::string note;
};

// All registered entries: constant, log-slice, quartic-basic, quartic-weighted,
// sextic (corrupted relation, a detection control; expect_pass = false),
// parabolic-cylinder.
const std::vector<TodaCatalogEntry>& toda_catalog();
// Lookup by name; throws TodaError on unknown names.
const TodaCatalogEntry& catalog_entry(const std::string& name);

}  // namespace tg

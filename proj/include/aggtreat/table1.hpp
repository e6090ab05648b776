#pragma once

#include "aggtreat/stats.hpp"

namespace aggtreat {

/// Built-in application fixture: a four-activity time-use support on a
/// half-hour grid with exact conditional frequencies and anchored cell means.
/// Frequencies were reconstructed by summing the published optimal-weight rows
/// and columns and reducing to exact fractions; means are anchored at zero for
/// the untreated cell and accumulated from the published pairwise mean
/// differences. Level masses are not published and are set uniform.
PopulationStats enrichment_fixture();

}  // namespace aggtreat

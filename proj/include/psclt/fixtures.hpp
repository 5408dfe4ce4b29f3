#pragma once

#include "psclt/automaton.hpp"

namespace psclt {

/// * feeds two disjoint copies of the rank-2 non-backtracking letter graph,
/// two entry edges each. With `connected`, one edge joins the first copy to the second.
MarkovAutomaton two_block_fixture(bool connected);

/// * -> c1 -> c2 -> c3, then c3 enters a rank-2 letter block (radius 3) directly
/// and through a transient complete block of radius 2.
MarkovAutomaton transient_chain_fixture();

}  // namespace psclt

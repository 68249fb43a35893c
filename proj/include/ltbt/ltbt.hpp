#pragma once

// Umbrella header for the ltbt library: process-equivalence checking on
// finite labeled transition systems via a two-dimensional modal fixpoint
// logic, with tabulating, need-driven and partially evaluated engines
// cross-checked against direct decision procedures.

#include "ltbt/bits.hpp"
#include "ltbt/equivalences.hpp"
#include "ltbt/errors.hpp"
#include "ltbt/formula.hpp"
#include "ltbt/gen.hpp"
#include "ltbt/lts.hpp"
#include "ltbt/mc_naive.hpp"
#include "ltbt/mc_needdriven.hpp"
#include "ltbt/oracles.hpp"
#include "ltbt/parse.hpp"
#include "ltbt/partial_eval.hpp"
#include "ltbt/rel2.hpp"
#include "ltbt/typecheck.hpp"

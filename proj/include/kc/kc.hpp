#pragma once

// Umbrella header for the KeyChain embedding library.

#include "kc/bitset.hpp"
#include "kc/embed.hpp"
#include "kc/errors.hpp"
#include "kc/exact.hpp"
#include "kc/gnp.hpp"
#include "kc/graph.hpp"
#include "kc/graph_io.hpp"
#include "kc/json_out.hpp"
#include "kc/keychain_template.hpp"
#include "kc/mcs.hpp"
#include "kc/params.hpp"
#include "kc/posa.hpp"
#include "kc/properties.hpp"
#include "kc/rng.hpp"
#include "kc/stats.hpp"
#include "kc/sweep.hpp"
#include "kc/tail_bounds.hpp"

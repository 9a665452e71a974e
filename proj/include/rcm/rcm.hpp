#pragma once

#include "rcm/bench.hpp"
#include "rcm/engine.hpp"
#include "rcm/lits.hpp"
#include "rcm/model.hpp"
#include "rcm/props.hpp"
#include "rcm/psplib_io.hpp"
#include "rcm/search.hpp"
#include "rcm/tempo.hpp"

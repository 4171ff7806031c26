#pragma once

#include "ptab/error.hpp"
#include "ptab/lang.hpp"
#include "ptab/pdg.hpp"
#include "ptab/tables.hpp"
#include "ptab/engine.hpp"
#include "ptab/generators.hpp"
#include "ptab/bench.hpp"

#pragma once

#include "tdalbp/bitset.hpp"
#include "tdalbp/bounds.hpp"
#include "tdalbp/expansion.hpp"
#include "tdalbp/generator.hpp"
#include "tdalbp/hoffmann.hpp"
#include "tdalbp/instance.hpp"
#include "tdalbp/instance_io.hpp"
#include "tdalbp/milp.hpp"
#include "tdalbp/oracle.hpp"
#include "tdalbp/search.hpp"
#include "tdalbp/solver.hpp"

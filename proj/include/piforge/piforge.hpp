#pragma once

#include "piforge/error.hpp"
#include "piforge/exactlin.hpp"
#include "piforge/core.hpp"
#include "piforge/dimexpr.hpp"
#include "piforge/units.hpp"
#include "piforge/pigroups.hpp"
#include "piforge/nondim.hpp"
#include "piforge/relation.hpp"
#include "piforge/problem.hpp"
#include "piforge/harness.hpp"

#pragma once

// Umbrella for the brute-force ground-truth generators.

#include "polyex/oracle_geometry.hpp"
#include "polyex/oracle_info.hpp"

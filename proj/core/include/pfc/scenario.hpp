#pragma once

#include <map>
#include <string>
#include <vector>

#include "pfc/simulator.hpp"

namespace pfc {

// filled in alongside the CLI front end
}  // namespace pfc

#include "pfc/scenario.hpp"

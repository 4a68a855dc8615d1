#include "doctest.h"

#include "swarmlab/numerics.hpp"

#pragma once

#include "renyi/linalg.hpp"
#include "renyi/states.hpp"
#include "renyi/divergences.hpp"
#include "renyi/conditional.hpp"
#include "renyi/io.hpp"
#include "renyi/harness.hpp"

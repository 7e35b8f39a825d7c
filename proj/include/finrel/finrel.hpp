#pragma once

// Umbrella header.

#include "finrel/ages.hpp"
#include "finrel/budget.hpp"
#include "finrel/canonical.hpp"
#include "finrel/class_oracle.hpp"
#include "finrel/cores.hpp"
#include "finrel/errors.hpp"
#include "finrel/homsearch.hpp"
#include "finrel/limits.hpp"
#include "finrel/pairing.hpp"
#include "finrel/structures.hpp"
#include "finrel/text_format.hpp"

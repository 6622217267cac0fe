#pragma once
// Umbrella header: 2-adic stratification of Euler totients — sieves,
// inverse-totient enumeration, stratified statistics, Dickson-form
// constructions, table reports, and the result cache.

#include "totstrat/arith.hpp"
#include "totstrat/cache.hpp"
#include "totstrat/config.hpp"
#include "totstrat/dickson.hpp"
#include "totstrat/inverse_totient.hpp"
#include "totstrat/reports.hpp"
#include "totstrat/strata.hpp"

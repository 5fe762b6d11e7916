#pragma once

#include "bank.hpp"
#include "bench.hpp"
#include "campaign.hpp"
#include "closure.hpp"
#include "differential.hpp"
#include "errors.hpp"
#include "formula.hpp"
#include "generator.hpp"
#include "literal.hpp"
#include "oracle.hpp"
#include "qdimacs.hpp"
#include "random.hpp"
#include "reducer.hpp"
#include "shrink.hpp"
#include "trace_json.hpp"

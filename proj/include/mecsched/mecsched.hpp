#pragma once

#include "mecsched/analysis.hpp"
#include "mecsched/catalog.hpp"
#include "mecsched/config.hpp"
#include "mecsched/dynamics.hpp"
#include "mecsched/engine.hpp"
#include "mecsched/error.hpp"
#include "mecsched/experiments.hpp"
#include "mecsched/policy.hpp"
#include "mecsched/workload.hpp"

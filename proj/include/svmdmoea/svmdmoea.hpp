#pragma once

#include "svmdmoea/random.hpp"
#include "svmdmoea/problems.hpp"
#include "svmdmoea/evolution.hpp"
#include "svmdmoea/classifier.hpp"
#include "svmdmoea/metrics.hpp"
#include "svmdmoea/dmoea.hpp"
#include "svmdmoea/plan.hpp"
#include "svmdmoea/records.hpp"
#include "svmdmoea/execute.hpp"
#include "svmdmoea/summary.hpp"

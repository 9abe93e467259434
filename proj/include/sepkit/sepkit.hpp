#pragma once

#include "sepkit/core.hpp"
#include "sepkit/equilibria.hpp"
#include "sepkit/expression.hpp"
#include "sepkit/flow.hpp"
#include "sepkit/orbit.hpp"
#include "sepkit/separatrix/bvp.hpp"
#include "sepkit/separatrix/candidate.hpp"
#include "sepkit/separatrix/curvature.hpp"
#include "sepkit/separatrix/index_scan.hpp"
#include "sepkit/separatrix/zdp.hpp"
#include "sepkit/winding.hpp"

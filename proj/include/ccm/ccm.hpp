#pragma once

#include "ccm/graph.hpp"
#include "ccm/io.hpp"
#include "ccm/swap.hpp"
#include "ccm/diagnostics.hpp"
#include "ccm/sampler.hpp"
#include "ccm/oracle.hpp"
#include "ccm/polarization.hpp"
#include "ccm/report.hpp"

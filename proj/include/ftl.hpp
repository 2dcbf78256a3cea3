#pragma once

#include "ftl/errors.hpp"
#include "ftl/velocity.hpp"
#include "ftl/initial_data.hpp"
#include "ftl/scenarios.hpp"
#include "ftl/ode.hpp"
#include "ftl/dynamics.hpp"
#include "ftl/piecewise.hpp"
#include "ftl/measures.hpp"
#include "ftl/diagnostics.hpp"
#include "ftl/reference.hpp"

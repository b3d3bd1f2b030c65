#pragma once

#include "alf/errors.hpp"
#include "alf/numeric.hpp"
#include "alf/geometry.hpp"
#include "alf/curvature.hpp"
#include "alf/metric_zoo.hpp"
#include "alf/quadrature.hpp"
#include "alf/extrapolation.hpp"
#include "alf/mass.hpp"
#include "alf/modes.hpp"
#include "alf/radial.hpp"
#include "alf/decay.hpp"
#include "alf/io.hpp"
#include "alf/cli.hpp"

#pragma once

#include "cyclekit/errors.hpp"
#include "cyclekit/rational.hpp"
#include "cyclekit/bipoly.hpp"
#include "cyclekit/unipoly.hpp"
#include "cyclekit/ratfunc.hpp"
#include "cyclekit/kinetic.hpp"
#include "cyclekit/lls.hpp"
#include "cyclekit/fixed_points.hpp"
#include "cyclekit/reduction.hpp"
#include "cyclekit/averaging.hpp"
#include "cyclekit/cycles.hpp"
#include "cyclekit/ode.hpp"
#include "cyclekit/verify.hpp"
#include "cyclekit/modelzoo.hpp"
#include "cyclekit/pipeline.hpp"
#include "cyclekit/io.hpp"

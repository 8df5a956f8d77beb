#pragma once

#include "wavered/rational.hpp"
#include "wavered/expr.hpp"
#include "wavered/diff.hpp"
#include "wavered/parse.hpp"
#include "wavered/jet.hpp"
#include "wavered/eval.hpp"
#include "wavered/sampling.hpp"
#include "wavered/minkowski.hpp"
#include "wavered/ansatz.hpp"
#include "wavered/compat.hpp"
#include "wavered/solvers.hpp"
#include "wavered/lift.hpp"

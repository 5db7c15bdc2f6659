#pragma once

#include "symreg/canonical.hpp"
#include "symreg/cli.hpp"
#include "symreg/common.hpp"
#include "symreg/config.hpp"
#include "symreg/data_io.hpp"
#include "symreg/dataset.hpp"
#include "symreg/engine.hpp"
#include "symreg/eval.hpp"
#include "symreg/expr.hpp"
#include "symreg/fitting.hpp"
#include "symreg/grammar.hpp"
#include "symreg/individual.hpp"
#include "symreg/mutation.hpp"
#include "symreg/options.hpp"
#include "symreg/ops.hpp"
#include "symreg/pareto.hpp"
#include "symreg/report.hpp"
#include "symreg/rng.hpp"
#include "symreg/selection.hpp"
#include "symreg/text.hpp"

#pragma once

#include <lalm/auglag.hpp>
#include <lalm/blalm.hpp>
#include <lalm/core/metrics.hpp>
#include <lalm/core/operator_norm.hpp>
#include <lalm/core/problem.hpp>
#include <lalm/ergodic.hpp>
#include <lalm/harness/experiment.hpp>
#include <lalm/harness/long_run.hpp>
#include <lalm/harness/rate_fit.hpp>
#include <lalm/harness/trace_csv.hpp>
#include <lalm/instances/bpdn.hpp>
#include <lalm/instances/brute_force.hpp>
#include <lalm/instances/minimax.hpp>
#include <lalm/instances/qcqp.hpp>
#include <lalm/instances/serialize.hpp>
#include <lalm/instances/tiny.hpp>
#include <lalm/lalm.hpp>
#include <lalm/pdyn.hpp>
#include <lalm/solver.hpp>

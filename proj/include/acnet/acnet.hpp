#pragma once

#include "acnet/affect_kernels.hpp"
#include "acnet/baselines.hpp"
#include "acnet/causal_graph.hpp"
#include "acnet/ci_test.hpp"
#include "acnet/direction_learner.hpp"
#include "acnet/evaluation.hpp"
#include "acnet/event_sequence.hpp"
#include "acnet/generator.hpp"
#include "acnet/kernel_checks.hpp"
#include "acnet/random.hpp"
#include "acnet/special_functions.hpp"

namespace acnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace acnet

#pragma once

#include "config.hpp"

#include "gpbayes/bayes.hpp"

#include <optional>
#include <string>

namespace gpbayes::cli {

/// Inverse problem assembled from the [forward], [noise], [data], [prior] and [domain] sections.
struct ProblemSetup {
  BayesProblem problem;
  std::string forward_type;
  std::optional<Point> true_u;  // set when the data were synthesized
};

ProblemSetup read_problem(const Config& cfg);

/// Prior mean (Gaussian), box center (uniform) or exp(log-mean) (log-normal).
Point prior_center(const Prior& prior);

}  // namespace gpbayes::cli

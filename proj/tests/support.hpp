#pragma once

#include <cmath>

#include "ttsa/engine.hpp"
#include "ttsa/markov.hpp"
#include "ttsa/problem.hpp"
#include "ttsa/schedule.hpp"

namespace ttsa::test {

inline ProblemInstance p1() {
  return ProblemInstance::scalar(0.25, 0.1, -0.1, 0.25, 0.5, 0.25);
}

// Second eigenvalue 0.7, pi = (2/3, 1/3).
inline FiniteMarkovChain two_state() {
  Matrix p(2, 2);
  p << 0.9, 0.1, 0.2, 0.8;
  return FiniteMarkovChain(p);
}

inline FiniteMarkovChain one_step_chain() {
  Matrix p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  return FiniteMarkovChain(p);
}

inline StepSchedule p1_schedule() { return StepSchedule::rate_optimal(8.2, 3.5); }

inline Experiment p1_noisy(double spread = 0.1,
                           ChainStart start = ChainStart::stationary()) {
  const auto chain = two_state();
  return Experiment(p1(), chain, make_spread_table(p1(), chain, spread),
                    p1_schedule(), Vector::Zero(1), Vector::Zero(1), start);
}

inline Experiment p1_noiseless() {
  return Experiment(p1(), FiniteMarkovChain::single_state(),
                    SampleTable::noiseless(p1()), p1_schedule(),
                    Vector::Zero(1), Vector::Zero(1));
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

}  // namespace ttsa::test

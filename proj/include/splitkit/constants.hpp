// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_CONSTANTS_HPP_
#define SPLITKIT_CONSTANTS_HPP_

// Stepsize-regime thresholds shared by the solver engine and the rate
// certification module. The literals are frozen here; rates.cpp recomputes
// them by bisection and the tests cross-check both against each other.

namespace splitkit {

// Positive root of x^3 + x^2 - 2x - 1 (equals 2*cos(2*pi/7)). For a smooth
// g with constant beta and relaxation 1/2, stepsizes gamma < kKappa * beta
// admit a monotone, summable sequence dominating the objective error.
inline constexpr double kKappa = 1.2469796037174672;

// Positive root of x^3 - 2x^2 - 1. Stepsizes gamma < kRho * beta mark the
// regime where the best-iterate objective bound needs no additive
// correction term.
inline constexpr double kRho = 2.2055694304005904;

// 1 - 1/kKappa^2: the weight that maximizes the stepsize range over which
// the composite objective-error sequence stays monotone.
inline constexpr double kThetaStar = 0.3568958678922096;

}  // namespace splitkit

#endif  // SPLITKIT_CONSTANTS_HPP_

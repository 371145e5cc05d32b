// Copyright 2026 The Funnel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FUNNEL_COMMON_HPP_
#define FUNNEL_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace funnel {

// Shared numeric tolerances. Probability mass checks are tight; geometric
// feasibility is looser because enumerated vertices carry rounding from
// constraint intersections; dedupe is looser still so that one geometric
// vertex never splits into two numerical ones.
inline constexpr double kMassTol = 1e-12;
inline constexpr double kFeasTol = 1e-9;
inline constexpr double kDedupeTol = 1e-7;
inline constexpr double kSupportTol = 1e-10;

// Privacy levels at or above this are treated as "no constraint": e^eps
// overflows a double past ~709.78, and no ratio of representable positive
// probabilities can exceed it anyway.
inline constexpr double kEpsilonUnbounded = 700.0;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

// Conditioning event has zero probability mass.
class ZeroProbabilityEvent : public Error {
 public:
  using Error::Error;
};

class EmptyPolytope : public Error {
 public:
  using Error::Error;
};

class UnboundedPolytope : public Error {
 public:
  using Error::Error;
};

// Vertex count exceeded the configured enumeration cap.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Subset-valued output space too large to iterate (OUE).
class AlphabetTooLarge : public Error {
 public:
  using Error::Error;
};

// A leakage function assumed increasing was observed decreasing.
class NonMonotoneDetected : public Error {
 public:
  using Error::Error;
};

class LPInfeasible : public Error {
 public:
  using Error::Error;
};

// Attribute count makes the 2^(m-1) conditioning-subset sweep infeasible.
class AttributeBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyAfterFiltering : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace funnel

#endif  // FUNNEL_COMMON_HPP_

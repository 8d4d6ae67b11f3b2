// Copyright 2026 The VISA-VIS Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VISAVIS_ERRORS_HPP_
#define VISAVIS_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace visavis {

// Base class for every error raised by the library. Callers that only care
// about "something went wrong in visavis" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define VISAVIS_DEFINE_ERROR(Name)          \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

VISAVIS_DEFINE_ERROR(IllegalAction);
VISAVIS_DEFINE_ERROR(ParseError);
VISAVIS_DEFINE_ERROR(LimitExceeded);
VISAVIS_DEFINE_ERROR(ShapeMismatch);
VISAVIS_DEFINE_ERROR(VersionMismatch);
VISAVIS_DEFINE_ERROR(CorruptCheckpoint);
VISAVIS_DEFINE_ERROR(TerminalRoot);
VISAVIS_DEFINE_ERROR(EmptyVisits);
VISAVIS_DEFINE_ERROR(DistributionMismatch);
VISAVIS_DEFINE_ERROR(ConfigInvalid);

#undef VISAVIS_DEFINE_ERROR

// Raised by the oracle when it runs out of nodes or plies before proving a
// value. `kind` tells the two apart; is_endgame() relies on it.
class BudgetExceeded : public Error {
 public:
  enum class Kind { kNodes, kPlies };
  BudgetExceeded(Kind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Raised by grad_step; the parameters are left untouched.
class NonFiniteGradient : public Error {
 public:
  NonFiniteGradient(std::string term, const std::string& what)
      : Error(what), term_(std::move(term)) {}
  const std::string& term() const { return term_; }

 private:
  std::string term_;
};

}  // namespace visavis

#endif  // VISAVIS_ERRORS_HPP_

// Copyright 2026 The Gaussify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAUSSIFY_ERRORS_H
#define GAUSSIFY_ERRORS_H

#include <stdexcept>
#include <string>

namespace gaussify {

/// An argument violates a documented precondition (negative mean, efficiency
/// outside [0, 1], unsupported moment order, ...).
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// A heralded merge step succeeded with probability below the configured floor.
class VanishingSuccessError : public std::runtime_error {
   public:
    VanishingSuccessError(const std::string &what, double p_succ) : std::runtime_error(what), p_succ(p_succ) {
    }
    double p_succ;
};

/// The heralded protocol has no asymptotic Gaussian state for these inputs.
class DivergenceError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Run configuration is inconsistent (e.g. truncation cap too small without acknowledgment).
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Maximum-likelihood reconstruction could not proceed.
class ReconstructionError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace gaussify

#endif

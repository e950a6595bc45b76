// Copyright 2026 The qdpath Authors
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

#pragma once

#include <stdexcept>
#include <string>

/// @file errors.hpp
/// Exception hierarchy.  Two failure families matter to callers:
///   - ConfigError: the user asked for something invalid (bad dimensions,
///     negative rates, malformed config, memory budget exceeded).  The CLI
///     maps these to exit code 2.
///   - NumericalError: a computation failed at runtime (quadrature residual
///     above tolerance, vanishing trace, non-finite values).  Exit code 3.

namespace qdpath {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user-supplied configuration or arguments.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Runtime numerical failure (non-convergence, degeneracy, overflow).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

namespace detail {

/// Throw ConfigError when a precondition on user input fails.
inline void require_config(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

/// Throw NumericalError when a runtime numerical check fails.
inline void require_numeric(bool ok, const std::string& msg) {
  if (!ok) throw NumericalError(msg);
}

}  // namespace detail
}  // namespace qdpath

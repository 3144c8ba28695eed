//  Copyright 2026 The latwin Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#pragma once

#include <stdexcept>

namespace latwin {

/// Bad run parameters: mismatched clock lengths, invalid sizes, bad config files.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A question the model cannot answer, e.g. concurrency of two states on the
/// same process.
class DomainError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed or incomplete traces (index gaps, wrong process count).
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Property refers to a predicate name that the payload schema lacks.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace latwin

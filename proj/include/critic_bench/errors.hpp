// Copyright 2026 The critic-bench Authors
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

#ifndef CRITIC_BENCH__ERRORS_HPP_
#define CRITIC_BENCH__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace critic_bench
{

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: bad keys, thresholds, missing files, empty route.
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Malformed or inconsistent input data.
class DataError : public Error
{
public:
  using Error::Error;
};

/// Every averaged sub-metric is absent, so the weighted average is undefined.
class UndefinedScoreError : public Error
{
public:
  using Error::Error;
};

/// A persisted pipeline artifact no longer matches its recorded hash.
class StaleArtifactError : public DataError
{
public:
  using DataError::DataError;
};

/// An operation was called with inputs that violate its precondition.
class PreconditionError : public Error
{
public:
  using Error::Error;
};

/// Failure talking to an external judge endpoint.
class JudgeEndpointError : public Error
{
public:
  using Error::Error;
};

}  // namespace critic_bench

#endif  // CRITIC_BENCH__ERRORS_HPP_

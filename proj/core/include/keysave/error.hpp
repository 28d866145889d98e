// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_ERROR_HPP_
#define KEYSAVE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace keysave {

// Malformed input data: corpus records, vocabulary/model files, responses.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition (bad k, bad rank, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Transport failures talking to a remote predictor.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace keysave

#endif  // KEYSAVE_ERROR_HPP_

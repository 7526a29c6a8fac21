// Copyright 2026 The snap-nulling Authors. All Rights Reserved.
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

#ifndef SNAP_ERROR_H_
#define SNAP_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace snap {

// Base class for every error raised by the library. Callers that only need a
// one-line cause can catch this and print what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented invariant (duplicate ids, bad label, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Mismatched dimensions between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input that makes an operation undefined: zero vector, empty set,
// single-class data.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Malformed byte stream or text file. offset() is the byte position at which
// the problem was detected, or -1 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::int64_t offset)
      : Error(offset >= 0 ? what + " (at byte " + std::to_string(offset) + ")"
                          : what),
        offset_(offset) {}
  std::int64_t offset() const { return offset_; }

 private:
  std::int64_t offset_;
};

// Checksum mismatch or unsupported version in a model file.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, int achievable_rank)
      : Error(what), achievable_rank_(achievable_rank) {}
  int achievable_rank() const { return achievable_rank_; }

 private:
  int achievable_rank_;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int epoch)
      : Error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

// Silhouette requested for a clustering with fewer than two clusters.
class UndefinedScoreError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration key or value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace snap

#endif  // SNAP_ERROR_H_

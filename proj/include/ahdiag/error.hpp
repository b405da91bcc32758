// Copyright 2026 The ahdiag Authors
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

#ifndef AHDIAG_ERROR_HPP_
#define AHDIAG_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ahdiag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (point not on graph, graph
// mismatch, bad index).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input data violates a structural requirement of the algorithm.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A numeric or configuration parameter is out of range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ahdiag

#endif  // AHDIAG_ERROR_HPP_

// Copyright 2026 The fwcheck authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fwcheck {

// Malformed or inconsistent input. Carries every problem found, so loaders
// can report all of them at once instead of stopping at the first.
class InputError : public std::runtime_error {
 public:
  explicit InputError(std::vector<std::string> problems);
  InputError(const std::string& field, const std::string& message);

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// The policy itself cannot be evaluated: unknown priority ids, priority
// cycles, or an incoherent policy handed to the conformance engine.
class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fwcheck

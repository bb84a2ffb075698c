// Copyright 2026 The spinent Authors
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

namespace spinent {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SPINENT_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                     \
    public:                                                         \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

SPINENT_DEFINE_ERROR(UnsupportedSpin);
SPINENT_DEFINE_ERROR(IndexOutOfRange);
SPINENT_DEFINE_ERROR(InvalidArgument);
SPINENT_DEFINE_ERROR(NonConservingTerm);
SPINENT_DEFINE_ERROR(DimensionMismatch);
SPINENT_DEFINE_ERROR(DimensionBudgetExceeded);
SPINENT_DEFINE_ERROR(NonHermitian);
SPINENT_DEFINE_ERROR(EvenLength);
SPINENT_DEFINE_ERROR(ResonantMode);
SPINENT_DEFINE_ERROR(InvalidDistribution);
SPINENT_DEFINE_ERROR(NotPositive);
SPINENT_DEFINE_ERROR(ToleranceFailure);
SPINENT_DEFINE_ERROR(PositivityViolation);

#undef SPINENT_DEFINE_ERROR

}  // namespace spinent

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


// spinent.hpp: umbrella header.

#pragma once

#include "spinent/config.hpp"
#include "spinent/dynamics.hpp"
#include "spinent/effective.hpp"
#include "spinent/ensemble.hpp"
#include "spinent/errors.hpp"
#include "spinent/experiments.hpp"
#include "spinent/hamiltonians.hpp"
#include "spinent/lindblad.hpp"
#include "spinent/measures.hpp"
#include "spinent/output.hpp"
#include "spinent/protocol.hpp"
#include "spinent/random.hpp"
#include "spinent/sector.hpp"
#include "spinent/spin.hpp"

// Copyright 2026 The scpir Authors
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

#pragma once

// Umbrella header for the storage-constrained PIR library.

#include "scpir/audit.hpp"
#include "scpir/bit_vector.hpp"
#include "scpir/engines.hpp"
#include "scpir/error.hpp"
#include "scpir/model.hpp"
#include "scpir/placement.hpp"
#include "scpir/random.hpp"
#include "scpir/rational.hpp"
#include "scpir/session.hpp"

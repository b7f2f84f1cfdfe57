//
// Copyright 2026 The mmbound Authors
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
//

// Umbrella header for the mmbound library.

#ifndef MMBOUND_MMBOUND_HPP_
#define MMBOUND_MMBOUND_HPP_

#include "mmbound/algebra.hpp"
#include "mmbound/bounds.hpp"
#include "mmbound/error.hpp"
#include "mmbound/io.hpp"
#include "mmbound/magnitude.hpp"
#include "mmbound/mechanism.hpp"
#include "mmbound/numkernel.hpp"
#include "mmbound/query_matrix.hpp"
#include "mmbound/strategies.hpp"
#include "mmbound/workloads.hpp"

#endif  // MMBOUND_MMBOUND_HPP_

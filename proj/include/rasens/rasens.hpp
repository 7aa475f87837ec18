//
// Copyright 2026 The rasens Authors
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


// Umbrella header for the rasens library.

#ifndef RASENS_RASENS_HPP_
#define RASENS_RASENS_HPP_

#include "rasens/analyzer.hpp"
#include "rasens/annotate.hpp"
#include "rasens/constraint.hpp"
#include "rasens/csv.hpp"
#include "rasens/dp.hpp"
#include "rasens/engine.hpp"
#include "rasens/error.hpp"
#include "rasens/oracle.hpp"
#include "rasens/query.hpp"
#include "rasens/rational.hpp"
#include "rasens/sensitivity_value.hpp"
#include "rasens/solver.hpp"
#include "rasens/syntax.hpp"

#endif  // RASENS_RASENS_HPP_

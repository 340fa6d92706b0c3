// Copyright 2026 The mmgcoop Authors
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

#ifndef MMGCOOP_MMGCOOP_HPP
#define MMGCOOP_MMGCOOP_HPP

#include "mmgcoop/csv.hpp"
#include "mmgcoop/errors.hpp"
#include "mmgcoop/game.hpp"
#include "mmgcoop/lp.hpp"
#include "mmgcoop/mip.hpp"
#include "mmgcoop/model.hpp"
#include "mmgcoop/mps.hpp"
#include "mmgcoop/report.hpp"
#include "mmgcoop/scenario.hpp"
#include "mmgcoop/scenario_io.hpp"
#include "mmgcoop/solver.hpp"
#include "mmgcoop/synthetic.hpp"
#include "mmgcoop/uncertainty.hpp"

#endif  // MMGCOOP_MMGCOOP_HPP

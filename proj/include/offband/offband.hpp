// Copyright 2026 The offband Authors.
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

#include "offband/config.hpp"
#include "offband/core.hpp"
#include "offband/environments.hpp"
#include "offband/estimators.hpp"
#include "offband/feature_map.hpp"
#include "offband/harness.hpp"
#include "offband/learners.hpp"
#include "offband/metrics.hpp"
#include "offband/plot.hpp"
#include "offband/results_io.hpp"
#include "offband/rng.hpp"
#include "offband/verify.hpp"
#include "offband/version.hpp"

// Copyright 2026 The bosondist Authors
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

// Umbrella header.

#include "bosondist/analytics.hpp"
#include "bosondist/errors.hpp"
#include "bosondist/interferometer.hpp"
#include "bosondist/matcore.hpp"
#include "bosondist/matrix_io.hpp"
#include "bosondist/montecarlo.hpp"
#include "bosondist/nocount.hpp"
#include "bosondist/noisemodel.hpp"
#include "bosondist/rng.hpp"
#include "bosondist/selftest.hpp"
#include "bosondist/sweep.hpp"

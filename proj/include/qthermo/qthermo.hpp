// Copyright 2026 The qthermo Authors
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

#include "qthermo/coherence_bounds.hpp"
#include "qthermo/core.hpp"
#include "qthermo/eto_channels.hpp"
#include "qthermo/finite_bath_sim.hpp"
#include "qthermo/format.hpp"
#include "qthermo/quasicycle.hpp"
#include "qthermo/thermo_majorization.hpp"

// Copyright 2026 The manlab Authors
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


// Umbrella header for the library (the CLI lives in manlab/cli.hpp).

#pragma once

#include "manlab/errors.hpp"
#include "manlab/rng.hpp"
#include "manlab/matrix.hpp"
#include "manlab/parallel.hpp"
#include "manlab/algebra.hpp"
#include "manlab/man.hpp"
#include "manlab/protocol.hpp"
#include "manlab/spec_io.hpp"
#include "manlab/report.hpp"

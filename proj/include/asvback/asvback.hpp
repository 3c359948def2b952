// asvback/asvback.hpp

// Copyright 2026  The asvback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "asvback/augment.hpp"
#include "asvback/calibration.hpp"
#include "asvback/core.hpp"
#include "asvback/error.hpp"
#include "asvback/io.hpp"
#include "asvback/metrics.hpp"
#include "asvback/normalization.hpp"
#include "asvback/random.hpp"
#include "asvback/scoring.hpp"
#include "asvback/synth.hpp"
#include "asvback/wav.hpp"

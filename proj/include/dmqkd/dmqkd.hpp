// Copyright 2026 The dmqkd Authors
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

#include "dmqkd/config.hpp"
#include "dmqkd/decoy.hpp"
#include "dmqkd/encoding.hpp"
#include "dmqkd/errors.hpp"
#include "dmqkd/linksim.hpp"
#include "dmqkd/numfmt.hpp"
#include "dmqkd/phase.hpp"
#include "dmqkd/photonics.hpp"
#include "dmqkd/schedule.hpp"
#include "dmqkd/secprops.hpp"

// Copyright 2026 The scenlib Authors
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

#ifndef SCENLIB__SCENLIB_HPP_
#define SCENLIB__SCENLIB_HPP_

#include "scenlib/commands.hpp"
#include "scenlib/config.hpp"
#include "scenlib/critical_set.hpp"
#include "scenlib/dynamics.hpp"
#include "scenlib/errors.hpp"
#include "scenlib/evaluation.hpp"
#include "scenlib/exposure.hpp"
#include "scenlib/io.hpp"
#include "scenlib/library.hpp"
#include "scenlib/numeric.hpp"
#include "scenlib/oracle.hpp"
#include "scenlib/parallel.hpp"
#include "scenlib/random.hpp"
#include "scenlib/scenario_space.hpp"

#endif  // SCENLIB__SCENLIB_HPP_

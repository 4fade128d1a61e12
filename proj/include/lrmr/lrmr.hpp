// Copyright 2026 The lrmr Authors. All Rights Reserved.
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

///
/// \file lrmr.hpp
///
/// Umbrella header.
///
#ifndef LRMR_LRMR_HPP
#define LRMR_LRMR_HPP

#include "lrmr/core.hpp"
#include "lrmr/linalg.hpp"
#include "lrmr/io.hpp"
#include "lrmr/report.hpp"
#include "lrmr/measurements.hpp"
#include "lrmr/init.hpp"
#include "lrmr/convex.hpp"
#include "lrmr/factored.hpp"
#include "lrmr/manifold.hpp"
#include "lrmr/hankel.hpp"
#include "lrmr/rpca.hpp"
#include "lrmr/bench.hpp"

#endif // LRMR_LRMR_HPP

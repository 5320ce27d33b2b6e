// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include "rbox/codec.hpp"
#include "rbox/geometry.hpp"
#include "rbox/harness.hpp"
#include "rbox/image.hpp"
#include "rbox/io.hpp"
#include "rbox/matcher.hpp"
#include "rbox/metrics.hpp"
#include "rbox/nms.hpp"
#include "rbox/pipeline.hpp"
#include "rbox/priors.hpp"
#include "rbox/random.hpp"

// Copyright 2026 The screenkit Authors
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

#include <gtest/gtest.h>

#include "screenkit/analysis/consistency.hpp"
#include "screenkit/analysis/effort.hpp"
#include "screenkit/analysis/experiment.hpp"
#include "screenkit/analysis/money.hpp"
#include "screenkit/analysis/render.hpp"
#include "screenkit/analysis/series.hpp"
#include "screenkit/baselines/classifiers.hpp"
#include "screenkit/baselines/grid_search.hpp"
#include "screenkit/baselines/serialize.hpp"
#include "screenkit/baselines/word2vec.hpp"
#include "screenkit/corpus.hpp"
#include "screenkit/llm/http_client.hpp"
#include "screenkit/llm/screen.hpp"
#include "screenkit/metrics.hpp"
#include "screenkit/prompt.hpp"
#include "screenkit/screenkit.hpp"

TEST(Headers, Compile) { SUCCEED(); }

// Copyright 2026 The critic-bench Authors
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

#ifndef CRITIC_BENCH__FIXTURES_HPP_
#define CRITIC_BENCH__FIXTURES_HPP_

#include "critic_bench/miner.hpp"
#include "critic_bench/scene.hpp"
#include "critic_bench/vocabulary.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace critic_bench
{

/// Synthetic scene layouts on a straight two-lane road.
enum class FixtureLayout
{
  kBypass,  ///< parked car in the ego lane; the human nudges left past it
  kYield,   ///< free lane; the human brakes for a pedestrian at the curb
  kFollow,  ///< slow lead vehicle; the human settles behind it
  kCruise,  ///< free lane at the speed limit
};
std::string_view to_string(FixtureLayout l);

struct FixtureOptions
{
  std::size_t scenes{20};
  std::uint64_t seed{7};
  double test_fraction{0.3};
};

struct FixtureCorpus
{
  std::vector<Scene> scenes;
  std::vector<FixtureLayout> layouts;
  SplitAssignment splits;
};

/// Deterministic corpus: same options, identical scenes. Scene ids are
/// "fx-0000", "fx-0001", ...; every scene passes validate_scene.
FixtureCorpus generate_fixtures(const FixtureOptions & options);

/// A single scene of the given layout, useful for targeted tests.
Scene make_fixture_scene(FixtureLayout layout, std::uint64_t seed, std::string scene_id);

/// Vocabulary grid matched to the fixture speeds; far smaller than the default.
VocabParams fixture_vocab_params();

}  // namespace critic_bench

#endif  // CRITIC_BENCH__FIXTURES_HPP_

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

#ifndef CRITIC_BENCH__RESPONSE_REWARD_HPP_
#define CRITIC_BENCH__RESPONSE_REWARD_HPP_

#include "critic_bench/miner.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace critic_bench
{

/// Grammar (EBNF, case-insensitive keyword and letter):
///
///   response = ws, think, ws, decision, ws ;
///   think    = "<think>", body, "</think>" ;
///   body     = { char } - ( { char }, ( "<think>" | "</think>" | decision ), { char } ) ;
///   decision = "Decision", ws, ":", ws, ( "A" | "B" ) ;
///   ws       = { " " | "\t" | "\r" | "\n" } ;
///
/// A decision inside the think body counts only when the letter is not
/// followed by a letter, digit or underscore.
struct ParsedResponse
{
  std::optional<std::string> think_block;
  std::optional<Slot> decision;
  bool well_formed{false};

  friend bool operator==(const ParsedResponse &, const ParsedResponse &) = default;
};

/// Total. On a grammar violation the first complete think block and the
/// decision after the last closing tag (else the last decision anywhere) are
/// still recovered.
ParsedResponse parse_response(std::string_view text);

/// Canonical text for a well-formed response.
std::string render_response(const std::string & think, Slot decision);

struct RewardWeights
{
  double format{0.5};
  double accuracy{0.5};
};

struct RewardBreakdown
{
  int format_reward{0};
  int accuracy_reward{0};
  double total{0.0};
};

/// Accuracy is scored on the recovered decision even when the format fails.
RewardBreakdown compute_reward(
  const ParsedResponse & parsed, Slot ground_truth, const RewardWeights & weights = {});

}  // namespace critic_bench

#endif  // CRITIC_BENCH__RESPONSE_REWARD_HPP_

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

#include "critic_bench/response_reward.hpp"

#include "critic_bench/errors.hpp"

#include <fmt/format.h>

#include <cctype>
#include <regex>

namespace critic_bench
{

namespace
{

constexpr std::string_view kOpen = "<think>";
constexpr std::string_view kClose = "</think>";

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::size_t skip_ws(std::string_view s, std::size_t i)
{
  while (i < s.size() && is_ws(s[i])) {
    ++i;
  }
  return i;
}

bool starts_with_ci(std::string_view s, std::size_t i, std::string_view word)
{
  if (s.size() - i < word.size()) {
    return false;
  }
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(s[i + k])) !=
        std::tolower(static_cast<unsigned char>(word[k]))) {
      return false;
    }
  }
  return true;
}

std::optional<Slot> letter(char c)
{
  switch (c) {
    case 'A':
    case 'a':
      return Slot::kA;
    case 'B':
    case 'b':
      return Slot::kB;
    default:
      return std::nullopt;
  }
}

// Strict parse of `decision ws EOF` starting at i.
std::optional<Slot> strict_decision_tail(std::string_view s, std::size_t i)
{
  if (!starts_with_ci(s, i, "decision")) {
    return std::nullopt;
  }
  i = skip_ws(s, i + 8);
  if (i >= s.size() || s[i] != ':') {
    return std::nullopt;
  }
  i = skip_ws(s, i + 1);
  if (i >= s.size()) {
    return std::nullopt;
  }
  const auto d = letter(s[i]);
  if (!d || skip_ws(s, i + 1) != s.size()) {
    return std::nullopt;
  }
  return d;
}

std::optional<Slot> last_decision(std::string_view s)
{
  static const std::regex re(R"(decision\s*:\s*([ab])(?![A-Za-z0-9_]))", std::regex::icase);
  std::optional<Slot> found;
  for (std::cregex_iterator it(s.data(), s.data() + s.size(), re), end; it != end; ++it) {
    found = letter((*it)[1].str()[0]);
  }
  return found;
}

}  // namespace

ParsedResponse parse_response(std::string_view text)
{
  ParsedResponse out;

  // Strict path.
  const std::size_t open = skip_ws(text, 0);
  if (text.substr(open, kOpen.size()) == kOpen) {
    const std::size_t body = open + kOpen.size();
    const std::size_t close = text.find(kClose, body);
    if (close != std::string_view::npos) {
      const auto inner = text.substr(body, close - body);
      if (inner.find(kOpen) == std::string_view::npos && !last_decision(inner)) {
        const std::size_t after = skip_ws(text, close + kClose.size());
        if (const auto d = strict_decision_tail(text, after)) {
          out.think_block = std::string(inner);
          out.decision = d;
          out.well_formed = true;
          return out;
        }
      }
    }
  }

  // Recovery path.
  const std::size_t first_open = text.find(kOpen);
  if (first_open != std::string_view::npos) {
    const std::size_t body = first_open + kOpen.size();
    const std::size_t close = text.find(kClose, body);
    if (close != std::string_view::npos) {
      const auto inner = text.substr(body, close - body);
      const auto nested = inner.find(kOpen);
      out.think_block =
        std::string(nested == std::string_view::npos ? inner : inner.substr(0, nested));
    }
  }
  const std::size_t last_close = text.rfind(kClose);
  if (last_close != std::string_view::npos) {
    out.decision = last_decision(text.substr(last_close + kClose.size()));
  }
  if (!out.decision) {
    out.decision = last_decision(text);
  }
  return out;
}

std::string render_response(const std::string & think, Slot decision)
{
  if (think.find(kOpen) != std::string::npos || think.find(kClose) != std::string::npos ||
      last_decision(think)) {
    throw PreconditionError("render_response: think text must not contain think tags or a decision");
  }
  return fmt::format("<think>{}</think>\nDecision: {}", think, to_string(decision));
}

RewardBreakdown compute_reward(
  const ParsedResponse & parsed, Slot ground_truth, const RewardWeights & weights)
{
  RewardBreakdown r;
  r.format_reward = parsed.well_formed ? 1 : 0;
  r.accuracy_reward = parsed.decision && *parsed.decision == ground_truth ? 1 : 0;
  r.total = r.format_reward * weights.format + r.accuracy_reward * weights.accuracy;
  return r;
}

}  // namespace critic_bench

// Copyright 2026 The uavgrid Authors.
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

// JSON game configuration. Either a preset, explicit coordinates, or an
// ASCII map:
//
//   {"map": ["A....", ".0...", "..R..", ".....", "....X"],
//    "movement": "clockwise"}
//
// Map legend: A agent start, R reward, X exit, '.' empty, a digit k marks
// the start cell of adversary k, which must lie on the patrol ring of
// exactly one reward. Rewards are numbered in row-major order.

#pragma once

#include <map>
#include <string>

#include "json.hpp"
#include "uavgrid/grid_env.hpp"

namespace uavgrid {

namespace detail {

inline Cell cell_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ConfigError(std::string(what) + " must be a [row, col] pair");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

inline Movement movement_from_json(const nlohmann::json& j) {
  if (!j.is_string()) throw ConfigError("movement must be a string");
  auto m = parse_movement(j.get<std::string>());
  if (!m) throw ConfigError("unknown movement '" + j.get<std::string>() + "'");
  return *m;
}

inline void parse_map(const nlohmann::json& rows, GameConfig& cfg,
                      std::map<int, Cell>& adversary_starts) {
  if (!rows.is_array() || rows.empty()) throw ConfigError("map must be a non-empty array of strings");
  cfg.height = static_cast<int>(rows.size());
  cfg.width = -1;
  bool have_start = false;
  bool have_exit = false;
  for (int r = 0; r < cfg.height; ++r) {
    if (!rows[r].is_string()) throw ConfigError("map rows must be strings");
    const auto line = rows[r].get<std::string>();
    if (cfg.width < 0) cfg.width = static_cast<int>(line.size());
    if (static_cast<int>(line.size()) != cfg.width) throw ConfigError("map rows must have equal length");
    for (int c = 0; c < cfg.width; ++c) {
      const char ch = line[c];
      const Cell cell{r, c};
      switch (ch) {
        case 'A':
          if (have_start) throw ConfigError("map has more than one agent start");
          cfg.start = cell;
          have_start = true;
          break;
        case 'X':
          if (have_exit) throw ConfigError("map has more than one exit");
          cfg.exit = cell;
          have_exit = true;
          break;
        case 'R': cfg.rewards.push_back(cell); break;
        case '.': break;
        default:
          if (ch >= '0' && ch <= '9') {
            if (!adversary_starts.emplace(ch - '0', cell).second) {
              throw ConfigError(std::string("map repeats adversary ") + ch);
            }
          } else {
            throw ConfigError(std::string("unknown map character '") + ch + "'");
          }
      }
    }
  }
  if (!have_start) throw ConfigError("map has no agent start 'A'");
  if (!have_exit) throw ConfigError("map has no exit 'X'");
}

}  // namespace detail

inline GameConfig game_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("game config must be a JSON object");
  GameConfig cfg;
  const Movement default_movement =
      j.contains("movement") ? detail::movement_from_json(j["movement"]) : Movement::Clockwise;

  if (j.contains("preset")) {
    const auto name = j["preset"].get<std::string>();
    if (name == "5x5") {
      cfg = paper_5x5(default_movement);
    } else if (name == "9x9") {
      cfg = paper_9x9(default_movement);
    } else {
      throw ConfigError("unknown preset '" + name + "'");
    }
  } else if (j.contains("map")) {
    std::map<int, Cell> starts;
    detail::parse_map(j["map"], cfg, starts);
    const nlohmann::json per_adv = j.value("adversaries", nlohmann::json::array());
    int expected = 0;
    for (const auto& [id, cell] : starts) {
      if (id != expected++) throw ConfigError("adversary digits must be numbered 0,1,2,... without gaps");
      AdversarySpec spec;
      spec.movement = default_movement;
      if (id < static_cast<int>(per_adv.size()) && per_adv[id].contains("movement")) {
        spec.movement = detail::movement_from_json(per_adv[id]["movement"]);
      }
      int owners = 0;
      for (std::size_t k = 0; k < cfg.rewards.size(); ++k) {
        const auto ring = patrol_ring(cfg.rewards[k]);
        const auto it = std::find(ring.begin(), ring.end(), cell);
        if (it != ring.end()) {
          spec.reward_index = static_cast<int>(k);
          spec.start_index = static_cast<int>(it - ring.begin());
          ++owners;
        }
      }
      if (owners != 1) {
        throw ConfigError("adversary " + std::to_string(id) +
                          " must start on the patrol ring of exactly one reward");
      }
      cfg.adversaries.push_back(spec);
    }
  } else {
    cfg.width = j.at("width").get<int>();
    cfg.height = j.at("height").get<int>();
    cfg.start = detail::cell_from_json(j.at("start"), "start");
    cfg.exit = detail::cell_from_json(j.at("exit"), "exit");
    cfg.rewards.clear();
    for (const auto& r : j.value("rewards", nlohmann::json::array())) {
      cfg.rewards.push_back(detail::cell_from_json(r, "reward"));
    }
    for (const auto& a : j.value("adversaries", nlohmann::json::array())) {
      AdversarySpec spec;
      spec.movement = a.contains("movement") ? detail::movement_from_json(a["movement"]) : default_movement;
      spec.reward_index = a.value("reward", 0);
      spec.start_index = a.value("start_index", 0);
      cfg.adversaries.push_back(spec);
    }
  }
  cfg.step_penalty = j.value("step_penalty", cfg.step_penalty);
  cfg.reward_value = j.value("reward_value", cfg.reward_value);
  cfg.capture_penalty = j.value("capture_penalty", cfg.capture_penalty);
  cfg.exit_bonus = j.value("exit_bonus", cfg.exit_bonus);
  cfg.max_steps = j.value("max_steps", cfg.max_steps);
  cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
  validate(cfg);
  return cfg;
}

inline GameConfig game_config_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return game_config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad game config: ") + e.what());
  }
}

}  // namespace uavgrid

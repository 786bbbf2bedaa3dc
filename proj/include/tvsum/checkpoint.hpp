// Copyright 2026 The tvsum Authors.
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

// Model checkpoint layout:
//
//   "TVSUM-CKPT 1\n"
//   one line of JSON: {"dim", "labels", "seed", "config"}
//   |labels| * dim float64 weights, row-major, little-endian
//   |labels| float64 biases, little-endian

#ifndef TVSUM_CHECKPOINT_HPP_
#define TVSUM_CHECKPOINT_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tvsum/error.hpp"
#include "tvsum/partial_label.hpp"

namespace tvsum {

inline constexpr std::string_view kCheckpointMagic = "TVSUM-CKPT";
inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json train_config_to_json(const TrainConfig &cfg) {
  return {{"loss", loss_name(cfg.loss)},
          {"schedule", schedule_name(cfg.schedule)},
          {"relabel", cfg.relabel},
          {"learning_rate", cfg.learning_rate},
          {"epochs_per_stage", cfg.epochs_per_stage},
          {"batch_size", cfg.batch_size},
          {"seed", cfg.seed},
          {"relabel_iterations", cfg.relabel_iterations}};
}

inline TrainConfig train_config_from_json(const nlohmann::json &j) {
  TrainConfig cfg;
  auto loss = parse_loss(j.at("loss").get<std::string>());
  auto schedule = parse_schedule(j.at("schedule").get<std::string>());
  if (!loss || !schedule) throw ParseError("unknown loss or schedule");
  cfg.loss = *loss;
  cfg.schedule = *schedule;
  cfg.relabel = j.at("relabel").get<bool>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.epochs_per_stage = j.at("epochs_per_stage").get<int>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.relabel_iterations = j.at("relabel_iterations").get<int>();
  return cfg;
}

namespace detail {

inline void put_f64(std::string &out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

inline double get_f64(std::string_view in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(
                static_cast<unsigned char>(in[offset + i]))
            << (8 * i);
  }
  return std::bit_cast<double>(bits);
}

}  // namespace detail

inline std::string save_checkpoint(const SoftmaxModel &model,
                                   const TrainConfig &cfg) {
  nlohmann::json header = {{"dim", model.dim()},
                           {"labels", model.label_space().names()},
                           {"seed", model.seed()},
                           {"config", train_config_to_json(cfg)}};
  std::string out(kCheckpointMagic);
  out += " " + std::to_string(kCheckpointVersion) + "\n";
  out += header.dump() + "\n";
  for (double w : model.weights()) detail::put_f64(out, w);
  for (double b : model.biases()) detail::put_f64(out, b);
  return out;
}

struct Checkpoint {
  SoftmaxModel model;
  TrainConfig config;
};

inline Checkpoint load_checkpoint(std::string_view bytes) {
  std::size_t nl = bytes.find('\n');
  std::string expect = std::string(kCheckpointMagic) + " " +
                       std::to_string(kCheckpointVersion);
  if (nl == std::string_view::npos || bytes.substr(0, nl) != expect) {
    throw ParseError("not a version " + std::to_string(kCheckpointVersion) +
                     " checkpoint");
  }
  std::size_t nl2 = bytes.find('\n', nl + 1);
  if (nl2 == std::string_view::npos) throw ParseError("truncated checkpoint");
  nlohmann::json header =
      nlohmann::json::parse(bytes.substr(nl + 1, nl2 - nl - 1), nullptr, false);
  if (header.is_discarded()) throw ParseError("bad checkpoint header");
  Checkpoint ck;
  try {
    LabelSpace labels(header.at("labels").get<std::vector<std::string>>());
    auto dim = header.at("dim").get<std::size_t>();
    ck.config = train_config_from_json(header.at("config"));
    ck.model = SoftmaxModel(labels, dim, header.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what());
  }
  std::size_t pos = nl2 + 1;
  std::size_t need = 8 * (ck.model.weights().size() + ck.model.biases().size());
  if (bytes.size() - pos != need) {
    throw ParseError("checkpoint payload has " +
                     std::to_string(bytes.size() - pos) + " bytes, expected " +
                     std::to_string(need));
  }
  for (double &w : ck.model.weights()) {
    w = detail::get_f64(bytes, pos);
    pos += 8;
  }
  for (double &b : ck.model.biases()) {
    b = detail::get_f64(bytes, pos);
    pos += 8;
  }
  return ck;
}

}  // namespace tvsum

#endif  // TVSUM_CHECKPOINT_HPP_

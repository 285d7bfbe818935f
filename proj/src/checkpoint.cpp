/**
 * Copyright 2026 The ShuffleMix Lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "shufflemix/errors.hpp"
#include "shufflemix/nets.hpp"

// Layout:
//   line 1: "SHUFFLEMIX-CKPT 1"
//   line 2: single-line JSON header (architecture, input, classes, eligible, layers)
//   rest:   parameter_count IEEE-754 doubles, little-endian, flatten_parameters() order

namespace shufflemix {

namespace {

constexpr const char* kMagic = "SHUFFLEMIX-CKPT";
constexpr int kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

nlohmann::json layer_json(const LayerParams& p) {
  return {{"kind", std::string(to_string(p.kind))},
          {"in", p.in_channels},
          {"out", p.out_channels}};
}

LayerParams layer_from_json(const nlohmann::json& j) {
  const LayerKind kind = layer_kind_from_string(j.at("kind").get<std::string>());
  const auto in = j.at("in").get<std::size_t>();
  const auto out = j.at("out").get<std::size_t>();
  switch (kind) {
    case LayerKind::kLinear: return LayerParams::linear(in, out);
    case LayerKind::kConv3x3: return LayerParams::conv3x3(in, out);
    case LayerKind::kRelu: return LayerParams::relu();
    case LayerKind::kGlobalAvgPool: return LayerParams::global_avg_pool();
  }
  throw FormatError("unsupported layer kind in checkpoint");
}

}  // namespace

void save_checkpoint(const Network& net, const std::string& path) {
  net.validate();
  nlohmann::json header;
  header["architecture"] = net.architecture;
  header["input"] = {net.input.c, net.input.h, net.input.w};
  header["num_classes"] = net.num_classes;
  header["eligible"] = net.eligible;
  header["parameter_count"] = net.parameter_count();
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& block : net.blocks) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& p : block) b.push_back(layer_json(p));
    blocks.push_back(std::move(b));
  }
  header["blocks"] = std::move(blocks);
  nlohmann::json head = nlohmann::json::array();
  for (const auto& p : net.head) head.push_back(layer_json(p));
  header["head"] = std::move(head);

  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp + " for writing");
    os << kMagic << ' ' << kVersion << '\n' << header.dump() << '\n';
    const auto flat = net.flatten_parameters();
    os.write(reinterpret_cast<const char*>(flat.data()),
             static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (!os) throw IoError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp);
}

Network load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path);
  std::string magic_line;
  std::getline(is, magic_line);
  if (magic_line != std::string(kMagic) + " " + std::to_string(kVersion)) {
    throw FormatError("not a version-" + std::to_string(kVersion) + " checkpoint: " + path);
  }
  std::string header_line;
  std::getline(is, header_line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt checkpoint header: ") + e.what());
  }

  Network net;
  net.architecture = header.at("architecture").get<std::string>();
  const auto in = header.at("input").get<std::vector<std::size_t>>();
  if (in.size() != 3) throw FormatError("checkpoint input shape must have 3 entries");
  net.input = Shape{1, in[0], in[1], in[2]};
  net.num_classes = header.at("num_classes").get<std::size_t>();
  net.eligible = header.at("eligible").get<std::vector<int>>();
  for (const auto& b : header.at("blocks")) {
    std::vector<LayerParams> block;
    for (const auto& l : b) block.push_back(layer_from_json(l));
    net.blocks.push_back(std::move(block));
  }
  for (const auto& l : header.at("head")) net.head.push_back(layer_from_json(l));

  const std::size_t count = net.parameter_count();
  if (count != header.at("parameter_count").get<std::size_t>()) {
    throw FormatError("checkpoint parameter count disagrees with its layer list");
  }
  std::vector<double> flat(count);
  const auto offset = is.tellg();
  is.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(is.gcount()) != count * sizeof(double)) {
    throw IoError("truncated checkpoint " + path + " at byte offset " +
                  std::to_string(static_cast<long long>(offset) + is.gcount()));
  }
  net.assign_parameters(flat);
  net.validate();
  return net;
}

}  // namespace shufflemix

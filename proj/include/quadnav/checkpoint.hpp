#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadnav/network.hpp"

namespace quadnav {

namespace detail {

inline constexpr char kBase64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline std::string base64_encode(const std::uint8_t* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    const std::uint32_t b0 = data[i];
    const std::uint32_t b1 = i + 1 < len ? data[i + 1] : 0;
    const std::uint32_t b2 = i + 2 < len ? data[i + 2] : 0;
    const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
    out.push_back(kBase64Chars[(triple >> 18) & 0x3f]);
    out.push_back(kBase64Chars[(triple >> 12) & 0x3f]);
    out.push_back(i + 1 < len ? kBase64Chars[(triple >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < len ? kBase64Chars[triple & 0x3f] : '=');
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string& s) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (s.size() % 4 != 0) throw std::invalid_argument("base64: length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(s.size() / 4 * 3);
  for (std::size_t i = 0; i < s.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = s[i + k];
      if (c == '=') {
        v[k] = 0;
        ++pad;
      } else {
        v[k] = value_of(c);
        if (v[k] < 0 || pad > 0) throw std::invalid_argument("base64: invalid character");
      }
    }
    const std::uint32_t triple = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back((triple >> 16) & 0xff);
    if (pad < 2) out.push_back((triple >> 8) & 0xff);
    if (pad < 1) out.push_back(triple & 0xff);
  }
  return out;
}

// doubles as base64 little-endian bytes, regardless of host order
inline std::string encode_doubles(const std::vector<double>& v) {
  std::vector<std::uint8_t> bytes(v.size() * 8);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint64_t u;
    std::memcpy(&u, &v[i], 8);
    for (int k = 0; k < 8; ++k) bytes[i * 8 + k] = static_cast<std::uint8_t>(u >> (8 * k));
  }
  return base64_encode(bytes.data(), bytes.size());
}

inline std::vector<double> decode_doubles(const std::string& b64, std::size_t expected) {
  const std::vector<std::uint8_t> bytes = base64_decode(b64);
  if (bytes.size() != expected * 8)
    throw std::invalid_argument("checkpoint: tensor byte count does not match shape");
  std::vector<double> out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint64_t u = 0;
    for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(bytes[i * 8 + k]) << (8 * k);
    std::memcpy(&out[i], &u, 8);
  }
  return out;
}

inline nlohmann::json tensor_entry(const std::string& name, std::vector<int> shape,
                                   const std::vector<double>& data) {
  return nlohmann::json{{"name", name}, {"shape", shape}, {"data", encode_doubles(data)}};
}

}  // namespace detail

struct Checkpoint {
  Network net;
  std::map<std::string, std::string> meta;
};

// Single-document JSON checkpoint: architecture, free-form metadata, and one
// base64 little-endian float64 blob per parameter tensor.
inline void save_model(const std::string& path, const Network& net,
                       const std::map<std::string, std::string>& meta = {}) {
  nlohmann::json j;
  j["format"] = "quadnav-model";
  j["version"] = 1;
  j["meta"] = meta;
  j["arch"] = {
      {"input_channels", net.spec.input_channels},
      {"input_length", net.spec.input_length},
      {"conv_channels", net.spec.conv_channels},
      {"conv_strides", net.spec.conv_strides},
      {"kernel", net.spec.kernel},
      {"dense_hidden", net.spec.dense_hidden},
  };
  nlohmann::json tensors = nlohmann::json::array();
  for (std::size_t i = 0; i < net.conv.size(); ++i) {
    const auto& c = net.conv[i];
    const std::string base = "conv" + std::to_string(i + 1);
    tensors.push_back(detail::tensor_entry(base + ".W", {c.out_channels, c.in_channels, c.kernel}, c.W));
    tensors.push_back(detail::tensor_entry(base + ".b", {c.out_channels}, c.b));
  }
  for (std::size_t i = 0; i < net.dense.size(); ++i) {
    const auto& d = net.dense[i];
    const std::string base = "dense" + std::to_string(i + 1);
    tensors.push_back(detail::tensor_entry(base + ".W", {d.out_dim, d.in_dim}, d.W));
    tensors.push_back(detail::tensor_entry(base + ".b", {d.out_dim}, d.b));
  }
  j["tensors"] = std::move(tensors);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open '" + path + "'");
  out << j.dump(2) << "\n";
}

inline Checkpoint load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "quadnav-model")
    throw std::runtime_error("load_model: '" + path + "' is not a quadnav model file");

  NetworkSpec spec;
  const auto& arch = j.at("arch");
  spec.input_channels = arch.at("input_channels").get<int>();
  spec.input_length = arch.at("input_length").get<int>();
  spec.conv_channels = arch.at("conv_channels").get<std::vector<int>>();
  spec.conv_strides = arch.at("conv_strides").get<std::vector<int>>();
  spec.kernel = arch.at("kernel").get<int>();
  spec.dense_hidden = arch.at("dense_hidden").get<std::vector<int>>();

  Checkpoint ck;
  ck.net = build_network(spec, 0);  // shapes only; parameters overwritten below
  if (j.contains("meta")) ck.meta = j.at("meta").get<std::map<std::string, std::string>>();

  std::map<std::string, const nlohmann::json*> by_name;
  for (const auto& t : j.at("tensors")) by_name[t.at("name").get<std::string>()] = &t;

  auto load_tensor = [&](const std::string& name, const std::vector<int>& want,
                         std::vector<double>& dst) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw std::runtime_error("load_model: missing tensor '" + name + "'");
    const auto shape = it->second->at("shape").get<std::vector<int>>();
    if (shape != want) throw std::runtime_error("load_model: shape mismatch for tensor '" + name + "'");
    dst = detail::decode_doubles(it->second->at("data").get<std::string>(), Tensor::numel(want));
    for (double v : dst)
      if (!std::isfinite(v)) throw std::runtime_error("load_model: non-finite value in '" + name + "'");
  };

  for (std::size_t i = 0; i < ck.net.conv.size(); ++i) {
    auto& c = ck.net.conv[i];
    const std::string base = "conv" + std::to_string(i + 1);
    load_tensor(base + ".W", {c.out_channels, c.in_channels, c.kernel}, c.W);
    load_tensor(base + ".b", {c.out_channels}, c.b);
  }
  for (std::size_t i = 0; i < ck.net.dense.size(); ++i) {
    auto& d = ck.net.dense[i];
    const std::string base = "dense" + std::to_string(i + 1);
    load_tensor(base + ".W", {d.out_dim, d.in_dim}, d.W);
    load_tensor(base + ".b", {d.out_dim}, d.b);
  }
  return ck;
}

}  // namespace quadnav

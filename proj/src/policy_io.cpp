#include "aoisched/policy_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "aoisched/errors.hpp"

namespace aoi {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t k = 0; k < sizeof(T); ++k) out.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
}

template <typename T>
T get(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw ConfigError("policy file truncated");
  std::uint64_t bits = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) bits |= std::uint64_t{bytes[pos + k]} << (8 * k);
  pos += sizeof(T);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

}  // namespace

std::vector<std::uint8_t> serialize_policy(const PolicyTable& policy) {
  const StateSpace space(policy.network);
  if (policy.choice.size() != space.size()) throw ConfigError("policy table size does not match M^N");
  std::vector<std::uint8_t> out;
  out.reserve(kPolicyHeaderBytes + 8 * policy.actions.size() + policy.choice.size());
  out.insert(out.end(), {'A', 'O', 'I', '1'});
  put<std::uint32_t>(out, kPolicyFormatVersion);
  put<std::uint32_t>(out, policy.network.N);
  put<std::uint32_t>(out, policy.network.M);
  put<std::uint32_t>(out, policy.network.R);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(policy.cost));
  put<double>(out, policy.solver.gamma);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(policy.actions.size()));
  put<std::uint64_t>(out, space.size());
  for (const Action& a : policy.actions) put<std::uint64_t>(out, a.mask);
  out.insert(out.end(), policy.choice.begin(), policy.choice.end());
  return out;
}

PolicyTable deserialize_policy(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPolicyHeaderBytes || std::memcmp(bytes.data(), "AOI1", 4) != 0)
    throw ConfigError("not a policy file (bad magic)");
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kPolicyFormatVersion) throw ConfigError("unsupported policy file version " + std::to_string(version));
  PolicyTable policy;
  policy.network.N = get<std::uint32_t>(bytes, pos);
  policy.network.M = get<std::uint32_t>(bytes, pos);
  policy.network.R = get<std::uint32_t>(bytes, pos);
  const auto cost = get<std::uint8_t>(bytes, pos);
  if (cost > 1) throw ConfigError("unknown cost kind in policy file");
  policy.cost = static_cast<CostKind>(cost);
  policy.solver.gamma = get<double>(bytes, pos);
  const auto action_count = get<std::uint32_t>(bytes, pos);
  const auto state_count = get<std::uint64_t>(bytes, pos);

  const StateSpace space(policy.network);  // validates N, R, M
  if (state_count != space.size()) throw ConfigError("policy file state count does not equal M^N");
  if (action_count == 0 || action_count > 256) throw ConfigError("policy file action count out of range");
  const std::uint64_t expected = kPolicyHeaderBytes + 8ull * action_count + state_count;
  if (bytes.size() != expected)
    throw ConfigError("policy file has " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(expected));

  for (std::uint32_t k = 0; k < action_count; ++k) {
    const Action a{get<std::uint64_t>(bytes, pos)};
    if (a.size() > static_cast<int>(policy.network.R) || (policy.network.N < 64 && (a.mask >> policy.network.N) != 0))
      throw ConfigError("policy file lists an inadmissible action");
    policy.actions.push_back(a);
  }
  policy.choice.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  for (std::uint8_t c : policy.choice)
    if (c >= action_count) throw ConfigError("policy file has an action index out of range");
  return policy;
}

void write_policy(const std::filesystem::path& path, const PolicyTable& policy) {
  const auto bytes = serialize_policy(policy);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

PolicyTable read_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + path.string());
  return deserialize_policy(bytes);
}

}  // namespace aoi

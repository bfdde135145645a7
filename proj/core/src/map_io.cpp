#include "infopatch/map_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "infopatch/error.hpp"

namespace infopatch {

namespace {

constexpr char kMagic[4] = {'I', 'I', 'M', 'P'};
constexpr std::size_t kHeaderSize = 4 + 2 + 4 * 5 + 1;

template <typename T>
void put_le(std::string& out, T value) {
  auto bits = static_cast<std::make_unsigned_t<T>>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(bits & 0xFF));
    bits = static_cast<decltype(bits)>(bits >> 8);
  }
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
  std::make_unsigned_t<T> bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<std::make_unsigned_t<T>>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  pos += sizeof(T);
  return static_cast<T>(bits);
}

std::uint32_t checked_u32(int value, const char* field) {
  if (value < 0) throw_data_error(std::string("IIMP: negative ") + field);
  return static_cast<std::uint32_t>(value);
}

int checked_int(std::uint32_t value, const char* field) {
  if (value > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw_data_error(std::string("IIMP: ") + field + " out of range");
  }
  return static_cast<int>(value);
}

}  // namespace

std::string encode_map(const ImportanceMap& map) {
  std::string out;
  out.reserve(kHeaderSize + 4 * map.size());
  out.append(kMagic, sizeof kMagic);
  put_le<std::uint16_t>(out, kMapFormatVersion);
  put_le<std::uint32_t>(out, checked_u32(map.rows(), "rows"));
  put_le<std::uint32_t>(out, checked_u32(map.cols(), "cols"));
  put_le<std::uint32_t>(out, checked_u32(map.geometry().patch_size(), "k"));
  put_le<std::uint32_t>(out, checked_u32(map.geometry().stride(), "stride"));
  put_le<std::uint32_t>(out, checked_u32(map.geometry().scale().value(), "scale"));
  out.push_back(static_cast<char>(map.metric()));
  for (const float s : map.scores()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(s));
  return out;
}

ImportanceMap decode_map(const std::string& bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw_data_error("not an IIMP file (bad magic or truncated header)");
  }
  std::size_t pos = sizeof kMagic;
  const auto version = get_le<std::uint16_t>(bytes, pos);
  if (version != kMapFormatVersion) {
    throw_data_error("unsupported IIMP version " + std::to_string(version));
  }
  const int rows = checked_int(get_le<std::uint32_t>(bytes, pos), "rows");
  const int cols = checked_int(get_le<std::uint32_t>(bytes, pos), "cols");
  const int k = checked_int(get_le<std::uint32_t>(bytes, pos), "k");
  const int stride = checked_int(get_le<std::uint32_t>(bytes, pos), "stride");
  const int scale = checked_int(get_le<std::uint32_t>(bytes, pos), "scale");
  const MetricKind metric = metric_from_tag(static_cast<std::uint8_t>(bytes[pos++]));

  const std::size_t count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (bytes.size() != kHeaderSize + 4 * count) {
    throw_data_error("IIMP payload size " + std::to_string(bytes.size() - kHeaderSize) +
                     " does not match " + std::to_string(rows) + "x" + std::to_string(cols) + " grid");
  }
  std::vector<float> scores(count);
  for (auto& s : scores) s = std::bit_cast<float>(get_le<std::uint32_t>(bytes, pos));
  return ImportanceMap(rows, cols, PatchGeometry(k, ScaleFactor(scale), stride), metric,
                       std::move(scores));
}

void write_map(const ImportanceMap& map, const std::filesystem::path& path) {
  const std::string bytes = encode_map(map);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw_io_error("write failed: " + path.string());
}

ImportanceMap read_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io_error("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_map(bytes);
}

}  // namespace infopatch

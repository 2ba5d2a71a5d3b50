#include "effpred/grad_store.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>

#include "effpred/error.hpp"
#include "effpred/simd/kernels.hpp"

namespace effpred::grdx {
namespace {

constexpr std::array<char, 4> kMagic{'G', 'R', 'D', 'X'};

template <typename T>
void store_le(std::uint8_t* out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out[i] = static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
}

template <typename T>
T load_le(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return static_cast<T>(v);
}

// Converts n binary32 values to little-endian bytes.
void floats_to_le(std::span<const float> values, std::uint8_t* out) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out, values.data(), values.size_bytes());
  } else {
    for (std::size_t i = 0; i < values.size(); ++i)
      store_le(out + 4 * i, std::bit_cast<std::uint32_t>(values[i]));
  }
}

void floats_from_le(const std::uint8_t* in, std::span<float> out) {
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data(), in, out.size_bytes());
  } else {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = std::bit_cast<float>(load_le<std::uint32_t>(in + 4 * i));
  }
}

// Reads exactly n bytes or reports how many arrived.
std::size_t read_bytes(std::istream& in, void* out, std::size_t n) {
  in.read(static_cast<char*>(out), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

template <typename T>
T read_header_int(std::istream& in, const char* what) {
  std::array<std::uint8_t, sizeof(T)> buf{};
  if (read_bytes(in, buf.data(), buf.size()) != buf.size())
    fail(ErrorCode::kCorruption, std::string("truncated header while reading ") + what);
  return load_le<T>(buf.data());
}

std::string record_context(std::size_t index) { return "record_index=" + std::to_string(index); }

}  // namespace

void validate_manifest(const Manifest& manifest) {
  if (manifest.empty()) fail(ErrorCode::kFormat, "manifest has no layers");
  if (manifest.size() > std::numeric_limits<std::uint32_t>::max())
    fail(ErrorCode::kFormat, "too many layers");
  std::unordered_map<std::string, std::size_t> names;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& layer = manifest[i];
    if (layer.dim == 0)
      fail(ErrorCode::kFormat, "layer '" + layer.name + "' has zero dim", "layer_index=" + std::to_string(i));
    if (layer.name.size() > std::numeric_limits<std::uint16_t>::max())
      fail(ErrorCode::kFormat, "layer name longer than 65535 bytes", "layer_index=" + std::to_string(i));
    if (!names.emplace(layer.name, i).second)
      fail(ErrorCode::kFormat, "duplicate layer name '" + layer.name + "'", "layer_index=" + std::to_string(i));
  }
}

std::uint64_t total_dim(const Manifest& manifest) noexcept {
  std::uint64_t total = 0;
  for (const auto& layer : manifest) total += layer.dim;
  return total;
}

std::uint64_t header_bytes(const Manifest& manifest) noexcept {
  std::uint64_t bytes = 4 + 4 + 4 + 4;
  for (const auto& layer : manifest) bytes += 2 + layer.name.size() + 8;
  return bytes;
}

std::uint64_t record_bytes(const Manifest& manifest) noexcept { return 8 + 4 * total_dim(manifest); }

// ---------------------------------------------------------------------------
// Writer

GrdxWriter::GrdxWriter(std::ostream& sink, Manifest manifest, std::uint32_t n_examples)
    : sink_(sink), manifest_(std::move(manifest)), expected_(n_examples) {
  validate_manifest(manifest_);
  total_dim_ = grdx::total_dim(manifest_);

  std::vector<std::uint8_t> header;
  header.reserve(header_bytes(manifest_));
  auto push = [&header](auto value) {
    std::array<std::uint8_t, sizeof(value)> buf{};
    store_le(buf.data(), value);
    header.insert(header.end(), buf.begin(), buf.end());
  };
  header.insert(header.end(), kMagic.begin(), kMagic.end());
  push(kVersion);
  push(static_cast<std::uint32_t>(manifest_.size()));
  for (const auto& layer : manifest_) {
    push(static_cast<std::uint16_t>(layer.name.size()));
    header.insert(header.end(), layer.name.begin(), layer.name.end());
    push(layer.dim);
  }
  push(n_examples);
  put(header.data(), header.size());
}

void GrdxWriter::put(const void* data, std::size_t size) {
  sink_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!sink_) fail(ErrorCode::kIo, "write to GRDX sink failed");
  bytes_ += size;
}

void GrdxWriter::write(std::uint64_t example_id, std::span<const float> values) {
  if (values.size() != total_dim_)
    fail(ErrorCode::kFormat,
         "record length " + std::to_string(values.size()) + " does not match manifest total " +
             std::to_string(total_dim_),
         record_context(written_));
  begin_record(example_id);
  append(values);
  end_record();
}

void GrdxWriter::begin_record(std::uint64_t example_id) {
  if (in_record_) fail(ErrorCode::kFormat, "begin_record inside an open record", record_context(written_));
  if (written_ >= expected_)
    fail(ErrorCode::kFormat, "more records than the declared n_examples", record_context(written_));
  if (!seen_ids_.insert(example_id).second)
    fail(ErrorCode::kValidation, "duplicate example_id " + std::to_string(example_id),
         record_context(written_));
  std::array<std::uint8_t, 8> buf{};
  store_le(buf.data(), example_id);
  put(buf.data(), buf.size());
  in_record_ = true;
  pending_ = total_dim_;
}

void GrdxWriter::append(std::span<const float> values) {
  if (!in_record_) fail(ErrorCode::kFormat, "append outside a record", record_context(written_));
  if (values.size() > pending_)
    fail(ErrorCode::kFormat, "record longer than manifest total " + std::to_string(total_dim_),
         record_context(written_));
  if (!simd::active().all_finite(values.data(), values.size()))
    fail(ErrorCode::kValidation, "non-finite gradient value", record_context(written_));
  if constexpr (std::endian::native == std::endian::little) {
    put(values.data(), values.size_bytes());
  } else {
    scratch_.resize(values.size_bytes());
    floats_to_le(values, scratch_.data());
    put(scratch_.data(), scratch_.size());
  }
  pending_ -= values.size();
}

void GrdxWriter::end_record() {
  if (!in_record_) fail(ErrorCode::kFormat, "end_record without begin_record", record_context(written_));
  if (pending_ != 0)
    fail(ErrorCode::kFormat,
         "record shorter than manifest total " + std::to_string(total_dim_) + " (" +
             std::to_string(pending_) + " values missing)",
         record_context(written_));
  in_record_ = false;
  ++written_;
}

void GrdxWriter::finish() {
  if (in_record_) fail(ErrorCode::kFormat, "finish with an open record", record_context(written_));
  if (written_ != expected_)
    fail(ErrorCode::kFormat,
         "wrote " + std::to_string(written_) + " records but declared " + std::to_string(expected_));
  sink_.flush();
  if (!sink_) fail(ErrorCode::kIo, "flush of GRDX sink failed");
}

// ---------------------------------------------------------------------------
// Reader

GrdxReader::GrdxReader(std::istream& source) : source_(source) {
  std::array<char, 4> magic{};
  if (read_bytes(source_, magic.data(), magic.size()) != magic.size() || magic != kMagic)
    fail(ErrorCode::kUnsupportedFormat, "missing GRDX magic");
  const auto version = read_header_int<std::uint32_t>(source_, "version");
  if (version != kVersion)
    fail(ErrorCode::kUnsupportedFormat, "unsupported GRDX version " + std::to_string(version));
  const auto n_layers = read_header_int<std::uint32_t>(source_, "n_layers");
  if (n_layers == 0) fail(ErrorCode::kFormat, "manifest has no layers");
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const auto name_len = read_header_int<std::uint16_t>(source_, "layer name length");
    std::string name(name_len, '\0');
    if (read_bytes(source_, name.data(), name_len) != name_len)
      fail(ErrorCode::kCorruption, "truncated header while reading layer name",
           "layer_index=" + std::to_string(i));
    const auto dim = read_header_int<std::uint64_t>(source_, "layer dim");
    manifest_.push_back({std::move(name), dim});
  }
  validate_manifest(manifest_);
  total_dim_ = grdx::total_dim(manifest_);
  n_examples_ = read_header_int<std::uint32_t>(source_, "n_examples");
  header_bytes_ = grdx::header_bytes(manifest_);
}

bool GrdxReader::next(GradientRecord& out) {
  if (cursor_ >= n_examples_) {
    if (!seeked_ && source_.peek() != std::char_traits<char>::eof())
      fail(ErrorCode::kCorruption, "trailing bytes after the last record",
           record_context(n_examples_));
    return false;
  }
  std::array<std::uint8_t, 8> id_buf{};
  if (read_bytes(source_, id_buf.data(), id_buf.size()) != id_buf.size())
    fail(ErrorCode::kCorruption, "record " + std::to_string(cursor_) + " is truncated",
         record_context(cursor_));
  out.example_id = load_le<std::uint64_t>(id_buf.data());
  out.values.resize(total_dim_);
  const std::size_t want = total_dim_ * sizeof(float);
  std::size_t got = 0;
  if constexpr (std::endian::native == std::endian::little) {
    got = read_bytes(source_, out.values.data(), want);
  } else {
    std::vector<std::uint8_t> raw(want);
    got = read_bytes(source_, raw.data(), want);
    if (got == want) floats_from_le(raw.data(), out.values);
  }
  if (got != want)
    fail(ErrorCode::kCorruption,
         "record " + std::to_string(cursor_) + " is truncated (" + std::to_string(want - got) +
             " bytes missing)",
         record_context(cursor_));
  if (!simd::active().all_finite(out.values.data(), out.values.size()))
    fail(ErrorCode::kCorruption, "record " + std::to_string(cursor_) + " holds a non-finite value",
         record_context(cursor_));
  if (!seeked_ && !seen_ids_.insert(out.example_id).second)
    fail(ErrorCode::kCorruption, "duplicate example_id " + std::to_string(out.example_id),
         record_context(cursor_));
  ++cursor_;
  return true;
}

std::optional<GradientRecord> GrdxReader::next() {
  GradientRecord record;
  if (!next(record)) return std::nullopt;
  return record;
}

void GrdxReader::seek(std::uint32_t index) {
  if (index > n_examples_)
    fail(ErrorCode::kValidation, "seek past the last record", record_context(index));
  const std::uint64_t offset = header_bytes_ + static_cast<std::uint64_t>(index) * (8 + 4 * total_dim_);
  source_.clear();
  source_.seekg(static_cast<std::streamoff>(offset));
  if (!source_) fail(ErrorCode::kIo, "source is not seekable or too short", record_context(index));
  cursor_ = index;
  seeked_ = true;
}

// ---------------------------------------------------------------------------

std::uint64_t write_dump(const Manifest& manifest, std::span<const GradientRecord> records,
                         std::ostream& sink) {
  if (records.size() > std::numeric_limits<std::uint32_t>::max())
    fail(ErrorCode::kFormat, "too many records for GRDX v1");
  GrdxWriter writer(sink, manifest, static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) writer.write(r.example_id, r.values);
  writer.finish();
  return writer.bytes_written();
}

std::uint64_t write_dump(const GradDump& dump, std::ostream& sink) {
  return write_dump(dump.manifest, dump.records, sink);
}

GradDump read_dump(std::istream& source) {
  GrdxReader reader(source);
  GradDump dump;
  dump.manifest = reader.manifest();
  dump.records.reserve(reader.size());
  GradientRecord record;
  while (reader.next(record)) dump.records.push_back(std::move(record));
  return dump;
}

void write_dump_file(const GradDump& dump, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open for writing", path.string());
  write_dump(dump, out);
}

GradDump read_dump_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open for reading", path.string());
  return read_dump(in);
}

GradDump gather(std::istream& source, std::span<const std::uint64_t> example_ids) {
  GrdxReader reader(source);
  std::unordered_map<std::uint64_t, std::size_t> wanted;
  for (std::size_t i = 0; i < example_ids.size(); ++i) wanted.emplace(example_ids[i], i);

  GradDump dump;
  dump.manifest = reader.manifest();
  std::vector<std::optional<GradientRecord>> slots(example_ids.size());
  GradientRecord record;
  while (reader.next(record)) {
    auto it = wanted.find(record.example_id);
    if (it != wanted.end()) slots[it->second] = record;
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i])
      fail(ErrorCode::kConsistency, "no gradient for example_id " + std::to_string(example_ids[i]),
           "example_id=" + std::to_string(example_ids[i]));
    dump.records.push_back(std::move(*slots[i]));
  }
  return dump;
}

}  // namespace effpred::grdx

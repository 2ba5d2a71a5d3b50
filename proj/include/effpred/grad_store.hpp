#pragma once

// GRDX v1: a flat container of per-example gradient vectors.
//
//   magic "GRDX" | u32 version=1 | u32 n_layers
//   n_layers x { u16 name_len | name bytes (UTF-8) | u64 dim }
//   u32 n_examples
//   n_examples x { u64 example_id | sum(dim) x binary32 }
//
// All integers and floats are little-endian. There is no padding, no
// compression and no checksum, so a file is exactly
//   header_bytes + n_examples * (8 + 4 * total_dim)
// bytes long and record i starts at a computable offset.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace effpred::grdx {

inline constexpr std::uint32_t kVersion = 1;

struct LayerManifestEntry {
  std::string name;
  std::uint64_t dim = 0;

  bool operator==(const LayerManifestEntry&) const = default;
};

using Manifest = std::vector<LayerManifestEntry>;

struct GradientRecord {
  std::uint64_t example_id = 0;
  std::vector<float> values;

  bool operator==(const GradientRecord&) const = default;
};

struct GradDump {
  Manifest manifest;
  std::vector<GradientRecord> records;

  bool operator==(const GradDump&) const = default;
};

/// Throws a format error on an empty manifest, zero dims, duplicate or
/// over-long names.
void validate_manifest(const Manifest& manifest);
std::uint64_t total_dim(const Manifest& manifest) noexcept;
std::uint64_t header_bytes(const Manifest& manifest) noexcept;
std::uint64_t record_bytes(const Manifest& manifest) noexcept;

/// Streams records into a sink. The header (including n_examples) is
/// written on construction; a record can be written whole or in pieces via
/// begin_record/append/end_record so that no record needs to be resident.
class GrdxWriter {
 public:
  GrdxWriter(std::ostream& sink, Manifest manifest, std::uint32_t n_examples);

  void write(std::uint64_t example_id, std::span<const float> values);

  void begin_record(std::uint64_t example_id);
  void append(std::span<const float> values);
  void end_record();

  /// Verifies that exactly n_examples records were written and flushes.
  void finish();

  std::uint64_t bytes_written() const noexcept { return bytes_; }
  const Manifest& manifest() const noexcept { return manifest_; }

 private:
  void put(const void* data, std::size_t size);

  std::ostream& sink_;
  Manifest manifest_;
  std::uint64_t total_dim_;
  std::uint32_t expected_;
  std::uint32_t written_ = 0;
  std::uint64_t bytes_ = 0;
  std::uint64_t pending_ = 0;
  bool in_record_ = false;
  std::unordered_set<std::uint64_t> seen_ids_;
  std::vector<std::uint8_t> scratch_;
};

/// Sequential reader. Parses and validates the header on construction.
class GrdxReader {
 public:
  explicit GrdxReader(std::istream& source);

  const Manifest& manifest() const noexcept { return manifest_; }
  std::uint32_t size() const noexcept { return n_examples_; }
  std::uint64_t total_dim() const noexcept { return total_dim_; }

  /// Reads the next record into `out`; false once all records are consumed.
  /// A short record is a corruption error naming its index.
  bool next(GradientRecord& out);
  std::optional<GradientRecord> next();

  /// Positions the reader at record `index` (seekable sources only).
  void seek(std::uint32_t index);

 private:
  std::istream& source_;
  Manifest manifest_;
  std::uint64_t total_dim_ = 0;
  std::uint64_t header_bytes_ = 0;
  std::uint32_t n_examples_ = 0;
  std::uint32_t cursor_ = 0;
  bool seeked_ = false;
  std::unordered_set<std::uint64_t> seen_ids_;
};

std::uint64_t write_dump(const Manifest& manifest, std::span<const GradientRecord> records,
                         std::ostream& sink);
std::uint64_t write_dump(const GradDump& dump, std::ostream& sink);
GradDump read_dump(std::istream& source);

void write_dump_file(const GradDump& dump, const std::filesystem::path& path);
GradDump read_dump_file(const std::filesystem::path& path);

/// Loads only the records whose ids are listed, in the order given. Missing
/// ids raise a consistency error.
GradDump gather(std::istream& source, std::span<const std::uint64_t> example_ids);

}  // namespace effpred::grdx

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "silver/embedding.hpp"
#include "silver/errors.hpp"
#include "silver/experiments.hpp"
#include "silver/matrix.hpp"
#include "silver/rng.hpp"

// File formats and the synthetic paired-embedding generator.
//
// SLVE binary layout (all integers little-endian, floats IEEE-754 binary32):
//   magic   "SLVE"
//   version u16   (currently 1)
//   dim     u32   (shared by every record in the file)
//   count   u64
//   then per record:
//     id_len u16, id bytes (UTF-8, non-empty)
//     M u32, L u32          (clip rows, token rows; both >= 1)
//     M*dim f32 clip values, row-major
//     L*dim f32 token values, row-major
//
// A JSONL sidecar variant of the same records is accepted for hand-authored
// fixtures: one object per line with keys "id", "clips", "tokens". Binary is
// canonical. Values are stored at 32-bit precision and widened in memory.

namespace silver::io {

inline constexpr std::uint16_t kSlveVersion = 1;
inline constexpr char kSlveMagic[4] = {'S', 'L', 'V', 'E'};

// One evaluation item: the clip-embedding matrix of a sign video and the
// token-embedding matrix of its text.
struct EmbeddingRecord {
  std::string id;
  ClipEmbeddings clips;
  TokenEmbeddings tokens;
};

namespace detail {

inline void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}
inline void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}
inline void put_f32(std::string& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

class ByteReader {
 public:
  ByteReader(std::string bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::size_t offset() const { return pos_; }

  std::string_view take(std::size_t n, const char* what) {
    if (pos_ + n > bytes_.size()) {
      throw CorruptRecordError(path_ + ": truncated while reading " + std::string(what) +
                               " at byte " + std::to_string(pos_));
    }
    std::string_view v(bytes_.data() + pos_, n);
    pos_ += n;
    return v;
  }

  std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(uint_le(2, what)); }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(uint_le(4, what)); }
  std::uint64_t u64(const char* what) { return uint_le(8, what); }
  float f32(const char* what) {
    return std::bit_cast<float>(static_cast<std::uint32_t>(uint_le(4, what)));
  }

  bool exhausted() const { return pos_ == bytes_.size(); }
  const std::string& path() const { return path_; }

 private:
  std::uint64_t uint_le(std::size_t n, const char* what) {
    const auto v = take(n, what);
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < n; ++k) {
      acc |= static_cast<std::uint64_t>(static_cast<unsigned char>(v[k])) << (8 * k);
    }
    return acc;
  }

  std::string bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failure on " + path);
  return std::move(ss).str();
}

inline void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.good()) throw IoError("write failure on " + path);
}

inline Matrix read_matrix_f32(ByteReader& r, std::size_t rows, std::size_t cols,
                              const std::string& id) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t at = r.offset();
      const float v = r.f32("embedding value");
      if (!std::isfinite(v)) {
        throw CorruptRecordError(r.path() + ": non-finite value in record '" + id +
                                 "' at byte " + std::to_string(at));
      }
      m(i, j) = static_cast<double>(v);
    }
  }
  return m;
}

}  // namespace detail

inline void save_embeddings(const std::vector<EmbeddingRecord>& records,
                            const std::string& path) {
  std::uint32_t dim = records.empty() ? 0 : static_cast<std::uint32_t>(records.front().clips.dim());
  std::string out;
  out.append(kSlveMagic, 4);
  detail::put_u16(out, kSlveVersion);
  detail::put_u32(out, dim);
  detail::put_u64(out, records.size());
  for (const auto& rec : records) {
    if (rec.clips.dim() != dim || rec.tokens.dim() != dim) {
      throw DimInconsistentError("record '" + rec.id + "' dim differs from file dim " +
                                 std::to_string(dim));
    }
    detail::put_u16(out, static_cast<std::uint16_t>(rec.id.size()));
    out += rec.id;
    detail::put_u32(out, static_cast<std::uint32_t>(rec.clips.clips()));
    detail::put_u32(out, static_cast<std::uint32_t>(rec.tokens.tokens()));
    for (double v : rec.clips.values.data()) detail::put_f32(out, static_cast<float>(v));
    for (double v : rec.tokens.values.data()) detail::put_f32(out, static_cast<float>(v));
  }
  detail::write_file(path, out);
}

namespace detail {

inline std::vector<EmbeddingRecord> load_embeddings_binary(std::string bytes,
                                                           const std::string& path) {
  ByteReader r(std::move(bytes), path);
  const auto magic = r.take(4, "magic");
  if (std::string_view(kSlveMagic, 4) != magic) {
    throw BadMagicError(path + ": bad magic, not an SLVE file");
  }
  const auto version = r.u16("version");
  if (version != kSlveVersion) {
    throw VersionMismatchError(path + ": format version " + std::to_string(version) +
                               ", expected " + std::to_string(kSlveVersion));
  }
  const std::uint32_t dim = r.u32("dim");
  const std::uint64_t count = r.u64("record count");
  std::vector<EmbeddingRecord> records;
  records.reserve(count);
  std::unordered_set<std::string> seen;
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::size_t rec_start = r.offset();
    const auto id_len = r.u16("id length");
    const std::string id(r.take(id_len, "id"));
    if (id.empty()) {
      throw CorruptRecordError(path + ": empty id in record at byte " +
                               std::to_string(rec_start));
    }
    if (!seen.insert(id).second) {
      throw DuplicateIdError(path + ": duplicate id '" + id + "' at byte " +
                             std::to_string(rec_start));
    }
    const std::uint32_t m = r.u32("clip count");
    const std::uint32_t l = r.u32("token count");
    if (m == 0 || l == 0 || dim == 0) {
      throw CorruptRecordError(path + ": record '" + id + "' has empty matrix (M=" +
                               std::to_string(m) + ", L=" + std::to_string(l) + ", D=" +
                               std::to_string(dim) + ") at byte " + std::to_string(rec_start));
    }
    Matrix clips = read_matrix_f32(r, m, dim, id);
    Matrix tokens = read_matrix_f32(r, l, dim, id);
    records.push_back({id, ClipEmbeddings::from(std::move(clips)),
                       TokenEmbeddings::from(std::move(tokens))});
  }
  if (!r.exhausted()) {
    throw CorruptRecordError(path + ": trailing bytes after last record at byte " +
                             std::to_string(r.offset()));
  }
  return records;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& path,
                               std::size_t line, const char* key) {
  if (!j.is_array() || j.empty()) {
    throw ParseError(path + ":" + std::to_string(line) + ": '" + key +
                     "' must be a non-empty array of rows");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(j.size());
  for (const auto& row : j) {
    if (!row.is_array() || row.empty()) {
      throw ParseError(path + ":" + std::to_string(line) + ": '" + key +
                       "' rows must be non-empty arrays");
    }
    std::vector<double> r;
    r.reserve(row.size());
    for (const auto& v : row) {
      if (!v.is_number()) {
        throw ParseError(path + ":" + std::to_string(line) + ": non-numeric value in '" +
                         key + "'");
      }
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        throw ParseError(path + ":" + std::to_string(line) + ": non-finite value in '" + key +
                         "'");
      }
      r.push_back(d);
    }
    rows.push_back(std::move(r));
  }
  try {
    return Matrix::from_rows(rows);
  } catch (const DimMismatchError&) {
    throw ParseError(path + ":" + std::to_string(line) + ": ragged rows in '" +
                     std::string(key) + "'");
  }
}

inline std::vector<EmbeddingRecord> load_embeddings_jsonl(const std::string& bytes,
                                                          const std::string& path) {
  std::vector<EmbeddingRecord> records;
  std::unordered_set<std::string> seen;
  std::optional<std::size_t> dim;
  std::istringstream in(bytes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("clips") || !j.contains("tokens")) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected object with id/clips/tokens");
    }
    if (!j["id"].is_string() || j["id"].get<std::string>().empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": id must be a non-empty string");
    }
    const std::string id = j["id"].get<std::string>();
    if (!seen.insert(id).second) {
      throw DuplicateIdError(path + ":" + std::to_string(line_no) + ": duplicate id '" + id + "'");
    }
    Matrix clips = matrix_from_json(j["clips"], path, line_no, "clips");
    Matrix tokens = matrix_from_json(j["tokens"], path, line_no, "tokens");
    if (clips.cols() != tokens.cols()) {
      throw DimInconsistentError(path + ":" + std::to_string(line_no) +
                                 ": clips dim != tokens dim in record '" + id + "'");
    }
    if (dim && clips.cols() != *dim) {
      throw DimInconsistentError(path + ":" + std::to_string(line_no) + ": record '" + id +
                                 "' dim " + std::to_string(clips.cols()) +
                                 " differs from file dim " + std::to_string(*dim));
    }
    dim = clips.cols();
    records.push_back({id, ClipEmbeddings::from(std::move(clips)),
                       TokenEmbeddings::from(std::move(tokens))});
  }
  return records;
}

}  // namespace detail

// Loads either format: SLVE magic selects binary, a leading '{' selects the
// JSONL sidecar; anything else is rejected.
inline std::vector<EmbeddingRecord> load_embeddings(const std::string& path) {
  std::string bytes = detail::read_file(path);
  if (bytes.size() >= 4 && std::string_view(bytes.data(), 4) == std::string_view(kSlveMagic, 4)) {
    return detail::load_embeddings_binary(std::move(bytes), path);
  }
  const auto first = bytes.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && bytes[first] == '{') {
    return detail::load_embeddings_jsonl(bytes, path);
  }
  throw BadMagicError(path + ": bad magic, neither SLVE binary nor JSONL");
}

inline void save_embeddings_jsonl(const std::vector<EmbeddingRecord>& records,
                                  const std::string& path) {
  std::string out;
  for (const auto& rec : records) {
    nlohmann::json j;
    j["id"] = rec.id;
    auto dump_matrix = [](const Matrix& m) {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
      }
      return rows;
    };
    j["clips"] = dump_matrix(rec.clips.values);
    j["tokens"] = dump_matrix(rec.tokens.values);
    out += j.dump();
    out += '\n';
  }
  detail::write_file(path, out);
}

// ---------------------------------------------------------------------------
// Corpus and prosody text formats: line-delimited UTF-8, one record per line.
// Corpus lines are TAB-separated: id, reference, hypothesis, and optionally a
// reordered hypothesis. Prosody lines are whitespace-separated: id followed by
// per-token intensities in {0,1,2}.

struct CorpusRecord {
  std::string id;
  std::string reference;
  std::string hypothesis;
  std::optional<std::string> reordered_hypothesis;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace detail

inline std::vector<CorpusRecord> load_corpus(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  std::istringstream in(bytes);
  std::vector<CorpusRecord> records;
  std::unordered_set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 3 or 4 tab-separated " +
                       "fields, got " + std::to_string(fields.size()));
    }
    CorpusRecord rec;
    rec.id = fields[0];
    rec.reference = fields[1];
    rec.hypothesis = fields[2];
    if (fields.size() == 4) rec.reordered_hypothesis = fields[3];
    if (rec.id.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty id");
    }
    if (rec.reference.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty reference");
    }
    if (!seen.insert(rec.id).second) {
      throw DuplicateIdError(path + ":" + std::to_string(line_no) + ": duplicate id '" + rec.id +
                             "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<ProsodyAnnotation> load_prosody(const std::string& path) {
  const std::string bytes = detail::read_file(path);
  std::istringstream in(bytes);
  std::vector<ProsodyAnnotation> annotations;
  std::unordered_set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::strip_cr(raw);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id;
    fields >> id;
    if (id.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty id");
    }
    if (!seen.insert(id).second) {
      throw DuplicateIdError(path + ":" + std::to_string(line_no) + ": duplicate id '" + id + "'");
    }
    std::vector<int> intensities;
    std::string tok;
    while (fields >> tok) {
      int v = 0;
      try {
        std::size_t used = 0;
        v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": non-integer intensity '" + tok +
                         "'");
      }
      if (v < 0 || v > 2) {
        throw BadIntensityError(path + ":" + std::to_string(line_no) + ": intensity " +
                                std::to_string(v) + " outside {0,1,2}");
      }
      intensities.push_back(v);
    }
    if (intensities.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": no intensities for id '" + id +
                       "'");
    }
    annotations.push_back(annotate_prosody(id, std::move(intensities)));
  }
  return annotations;
}

// ---------------------------------------------------------------------------
// Synthetic paired embeddings: a desk-scale stand-in for a trained joint
// encoder. Each item draws a latent unit direction z; clip rows are
// normalize(z + eps) and token rows normalize(z + eps'), with iid Gaussian
// noise of scale noise_sigma per coordinate. Values are rounded to 32-bit
// float precision so files round-trip bitwise.

struct SynthesisConfig {
  std::size_t n = 0;
  std::size_t dim = 64;
  std::pair<std::size_t, std::size_t> clips_range{3, 10};
  std::pair<std::size_t, std::size_t> tokens_range{3, 10};
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  std::vector<EmbeddingRecord> records;
  std::vector<std::pair<std::string, std::string>> ground_truth_pairing;  // video id, text id
};

namespace detail {

inline std::vector<double> random_unit_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (;;) {
    double norm2 = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
    if (norm2 > 1e-12) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& x : v) x *= inv;
      return v;
    }
  }
}

inline Matrix noisy_copies(Rng& rng, const std::vector<double>& latent, std::size_t rows,
                           double sigma) {
  const std::size_t dim = latent.size();
  Matrix m(rows, dim);
  for (std::size_t i = 0; i < rows; ++i) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = latent[j] + sigma * rng.normal();
      m(i, j) = v;
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t j = 0; j < dim; ++j) {
      m(i, j) = static_cast<double>(static_cast<float>(m(i, j) * inv));
    }
  }
  return m;
}

}  // namespace detail

inline SyntheticData generate_synthetic(const SynthesisConfig& config) {
  if (config.dim < 2) throw Error("generate_synthetic: dim must be >= 2");
  if (config.clips_range.first < 1 || config.clips_range.first > config.clips_range.second ||
      config.tokens_range.first < 1 || config.tokens_range.first > config.tokens_range.second) {
    throw Error("generate_synthetic: invalid clip/token ranges");
  }
  Rng rng(config.seed);
  SyntheticData data;
  data.records.reserve(config.n);
  char idbuf[32];
  for (std::size_t k = 0; k < config.n; ++k) {
    std::snprintf(idbuf, sizeof(idbuf), "item-%06zu", k);
    const auto latent = detail::random_unit_vector(rng, config.dim);
    const auto m = rng.between(config.clips_range.first, config.clips_range.second);
    const auto l = rng.between(config.tokens_range.first, config.tokens_range.second);
    Matrix clips = detail::noisy_copies(rng, latent, m, config.noise_sigma);
    Matrix tokens = detail::noisy_copies(rng, latent, l, config.noise_sigma);
    data.records.push_back({idbuf, ClipEmbeddings::from(std::move(clips)),
                            TokenEmbeddings::from(std::move(tokens))});
    data.ground_truth_pairing.emplace_back(idbuf, idbuf);
  }
  return data;
}

inline void save_pairing(const std::vector<std::pair<std::string, std::string>>& pairing,
                         const std::string& path) {
  std::string out;
  for (const auto& [video, text] : pairing) {
    out += video;
    out += '\t';
    out += text;
    out += '\n';
  }
  detail::write_file(path, out);
}

}  // namespace silver::io

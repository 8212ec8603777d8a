#include "panelist/trial_log.hpp"

#include <algorithm>
#include <sstream>

#include "panelist/digest.hpp"
#include "panelist/error.hpp"

namespace panelist {

namespace fs = std::filesystem;

TrialLogWriter::TrialLogWriter(const fs::path& path) : out_(path, std::ios::app | std::ios::binary) {
  if (!out_) throw Error("cannot open trial log " + path.string());
}

void TrialLogWriter::append(std::span<const TrialRecord> records) {
  std::string buf;
  for (const auto& r : records) {
    buf += to_json_line(r);
    buf += '\n';
  }
  std::lock_guard lock(mutex_);
  out_ << buf;
  out_.flush();
}

namespace {

std::vector<TrialRecord> parse_lines(const fs::path& path, const std::string& text, bool tolerate_tail) {
  std::vector<TrialRecord> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  const bool ends_clean = text.empty() || text.back() == '\n';
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_trial_line(line));
    } catch (const SchemaError& e) {
      const bool is_tail = in.peek() == std::char_traits<char>::eof();
      if (tolerate_tail && is_tail && !ends_clean) break;
      throw SchemaError(path.filename().string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<TrialRecord> read_trial_log(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw SchemaError("trial log " + path.filename().string() + " cannot be read");
  }
  if (!text.empty() && text.back() != '\n') {
    throw SchemaError("trial log " + path.filename().string() + " is truncated (no final newline)");
  }
  auto records = parse_lines(path, text, false);
  if (records.empty()) {
    throw SchemaError("trial log " + path.filename().string() + " is empty");
  }
  return records;
}

std::vector<TrialRecord> read_partial_trial_log(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return {};
  return parse_lines(path, read_file(path), true);
}

std::string serialize_trial_log(std::vector<TrialRecord> records) {
  std::stable_sort(records.begin(), records.end(), protocol_order);
  std::string out;
  for (const auto& r : records) {
    out += to_json_line(r);
    out += '\n';
  }
  return out;
}

void finalize_trial_log(const fs::path& path, std::vector<TrialRecord> records) {
  write_file_atomic(path, serialize_trial_log(std::move(records)));
}

}  // namespace panelist

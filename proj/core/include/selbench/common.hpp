#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace selbench {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or violated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or solver failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

std::string_view version() noexcept;

// ---------------------------------------------------------------------------
// Random streams
//
// Every random decision in the project draws from a stream whose seed is
// derived from a root seed plus a purpose key and integer coordinates, so a
// stage (or a single user inside a stage) can be reproduced in isolation.
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard; the bounded/real draws below are defined here rather than taken
// from <random> distributions, whose algorithms differ across standard
// libraries.
// ---------------------------------------------------------------------------

std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t purpose_key(std::string_view purpose) noexcept;
std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose,
                          std::initializer_list<std::uint64_t> coords = {}) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t root, std::string_view purpose,
      std::initializer_list<std::uint64_t> coords = {})
      : engine_(derive_seed(root, purpose, coords)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double low, double high) { return low + (high - low) * uniform01(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Parallel loop
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items are
/// claimed dynamically; callers write results to per-index slots so the
/// outcome never depends on scheduling. The exception of the lowest failing
/// index is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  const auto workers = static_cast<std::size_t>(threads) < n ? threads : static_cast<unsigned>(n);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Text helpers
// ---------------------------------------------------------------------------

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// strtod-based parse of a full field; throws InputError on garbage.
double parse_double(std::string_view text, std::string_view what);
std::int64_t parse_int(std::string_view text, std::string_view what);

std::vector<std::string_view> split_fields(std::string_view line, std::string_view delimiter);
std::string csv_escape(std::string_view field);
/// Splits a comma-separated line honouring double-quoted fields.
std::vector<std::string> parse_csv_line(std::string_view line);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames, so readers never see a
/// partially written artifact.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace selbench

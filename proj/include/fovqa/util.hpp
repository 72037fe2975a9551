#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fovqa {

// Configuration / input errors that a caller can fix (manifest schema,
// duplicate ids, bad CLI arguments). The CLI maps these to exit code 2;
// everything else thrown during a run maps to exit code 3.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Runs fn(i) for i in [0, n). jobs <= 1 executes inline. Tasks must write
// only to their own slot so results do not depend on the degree of
// parallelism.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load() && first_error) std::rethrow_exception(first_error);
}

// Float formatting used by every report writer: 9 significant digits,
// infinities spelled "inf"/"-inf".
std::string format_float(double v);

// Writes content to path atomically (temp file + rename).
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace fovqa

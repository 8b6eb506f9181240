#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace phasebench {

// Failure categories; values double as process exit codes in the CLI.
enum class errc : int {
  guarded_abort = 1,
  missing_file = 2,
  parse_error = 3,
  unknown_key = 4,
  invariant_violation = 5,
  unknown_subcommand = 64,
};

// All library failures are thrown as this type. `slug` is a short stable
// machine-readable tag, `what()` the human-readable detail.
class error : public std::runtime_error {
public:
  error(errc code, std::string slug, const std::string& detail)
      : std::runtime_error(detail), code_(code), slug_(std::move(slug)) {}

  errc code() const noexcept { return code_; }
  const std::string& slug() const noexcept { return slug_; }

private:
  errc code_;
  std::string slug_;
};

[[noreturn]] inline void fail(errc code, const std::string& slug,
                              const std::string& detail) {
  throw error(code, slug, detail);
}

} // namespace phasebench

#pragma once

#include <stdexcept>
#include <string>

namespace ringlab {

// Config / usage problems. The CLI maps this to exit code 2.
class config_error : public std::runtime_error {
 public:
  config_error(std::string message, int line = 0, std::string field = {})
      : std::runtime_error(format(message, line, field)),
        line_(line),
        field_(std::move(field)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& message, int line,
                            const std::string& field) {
    std::string out = "config error";
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    if (!field.empty()) out += " [" + field + "]";
    out += ": " + message;
    return out;
  }

  int line_;
  std::string field_;
};

// Numerical failure with enough context to reproduce (seed, trial id, ...).
// Never reported as a silent NaN. The CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& message, const std::string& context = {})
      : std::runtime_error(context.empty() ? message
                                           : message + " [" + context + "]") {}
};

// Rank-deficient input to a factorization. Haar sampling treats this as a
// resample signal.
class rank_deficient_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

}  // namespace ringlab

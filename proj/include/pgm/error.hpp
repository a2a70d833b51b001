#ifndef PGM_ERROR_HPP
#define PGM_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace pgm {

/// A violated type invariant. `violations()` carries every problem found, not
/// only the first one.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& message)
      : std::invalid_argument(message), violations_{message} {}
  explicit ValidationError(std::vector<std::string> violations)
      : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& item : items) {
      if (!out.empty()) out += "; ";
      out += item;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// Raised when a computation needs a nonzero total mass and gets zero.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace pgm

#endif  // PGM_ERROR_HPP

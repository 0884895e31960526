#pragma once

#include <stdexcept>
#include <string>

namespace jointlim {

// Invalid model or configuration parameters (|theta| >= 1, sd <= 0, bad enum, ...).
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cross-section with no treated or no control units: the difference-in-means
// weights are undefined.
class degenerate_design_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A plug-in variance of exactly zero; the t-ratio is undefined.
class degenerate_variance_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested an analytic quantity that is only available for built-in families.
class not_implemented_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input file; carries the file and 1-based line of the offending token.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& file, long line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  long line() const { return line_; }

 private:
  std::string file_;
  long line_;
};

// Filesystem failure; carries the path involved.
class io_error : public std::runtime_error {
 public:
  io_error(const std::string& path, const std::string& what)
      : std::runtime_error(what + ": " + path), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace jointlim

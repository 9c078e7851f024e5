#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aspectmill {

// Base for every user/input error raised by the library. The CLI maps these
// to exit code 1; anything else escaping is treated as an internal failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownAspectError : public ValidationError {
 public:
  explicit UnknownAspectError(const std::string& aspect)
      : ValidationError("unknown aspect '" + aspect + "'"), aspect_(aspect) {}

  const std::string& aspect() const noexcept { return aspect_; }

 private:
  std::string aspect_;
};

class ScoreRangeError : public ValidationError {
 public:
  explicit ScoreRangeError(long long score)
      : ValidationError("polarity score " + std::to_string(score) +
                        " outside [-9,9] and not 99"),
        score_(score) {}

  long long score() const noexcept { return score_; }

 private:
  long long score_;
};

// Record-positioned corpus error; wraps the underlying cause.
class CorpusError : public Error {
 public:
  CorpusError(const std::string& source, std::size_t record, const std::string& what)
      : Error(source + ": record " + std::to_string(record) + ": " + what),
        record_(record) {}

  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

// Raised when a self-check on library output fails (gating, bundle shape).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace aspectmill

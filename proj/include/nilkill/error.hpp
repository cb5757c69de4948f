#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nilkill {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is a byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string found);

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t offset_;
  std::string expected_;
  std::string found_;
};

/// An identifier that is neither a chart coordinate nor a parameter.
class BindError : public Error {
 public:
  using Error::Error;
};

/// Division by zero, or a negative power of zero.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// log/sqrt outside their real domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateMetricError : public Error {
 public:
  using Error::Error;
};

/// A jet of too low order was supplied to a differentiating operation.
class OrderError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class NoAdmissiblePointsError : public Error {
 public:
  using Error::Error;
};

/// A flow left the chart's sampling box or hit the singular locus.
class OrbitEscapeError : public Error {
 public:
  OrbitEscapeError(double time, std::vector<double> last_point, const std::string& what);

  double time() const noexcept { return time_; }
  const std::vector<double>& last_point() const noexcept { return last_point_; }

 private:
  double time_;
  std::vector<double> last_point_;
};

/// MetricDocument failed validation; `path` locates the offending JSON node.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message);

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace nilkill

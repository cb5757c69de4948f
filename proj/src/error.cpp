#include "nilkill/error.hpp"

#include <utility>

namespace nilkill {

ParseError::ParseError(std::size_t offset, std::string expected, std::string found)
    : Error("parse error at offset " + std::to_string(offset) + ": expected " + expected +
            ", found " + found),
      offset_(offset),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

OrbitEscapeError::OrbitEscapeError(double time, std::vector<double> last_point,
                                   const std::string& what)
    : Error(what), time_(time), last_point_(std::move(last_point)) {}

SchemaError::SchemaError(std::string path, const std::string& message)
    : Error((path.empty() ? std::string("/") : path) + ": " + message), path_(std::move(path)) {}

}  // namespace nilkill

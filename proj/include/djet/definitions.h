/*******************************************************************************
 * Basic type definitions and the library exception type.
 *
 * @file:   definitions.h
 ******************************************************************************/
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace djet {
using NodeID = std::uint32_t;
using EdgeID = std::uint64_t;
using BlockID = std::uint32_t;
using PEID = std::uint32_t;

// Vertex weights, edge weights, cuts and gains all share one signed 64 bit
// type; gains may be negative.
using Weight = std::int64_t;

constexpr NodeID kInvalidNodeID = std::numeric_limits<NodeID>::max();
constexpr BlockID kInvalidBlockID = std::numeric_limits<BlockID>::max();

enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kIO,
};

class Error : public std::runtime_error {
public:
  Error(const ErrorKind kind, const std::string &what) : std::runtime_error(what), _kind(kind) {}

  [[nodiscard]] ErrorKind kind() const {
    return _kind;
  }

private:
  ErrorKind _kind;
};

[[noreturn]] inline void throw_invalid_argument(const std::string &what) {
  throw Error(ErrorKind::kInvalidArgument, what);
}
} // namespace djet

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace smoothride {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented invariant. `index()` carries the offending
/// element (station, sample) when there is one.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what,
                           std::optional<std::size_t> index = std::nullopt)
      : Error(what), index_(index) {}

  std::optional<std::size_t> index() const { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two consecutive waypoints coincide, so the segment has no direction.
class DegenerateSegmentError : public Error {
 public:
  DegenerateSegmentError(const std::string& what, std::size_t segment)
      : Error(what), segment_(segment) {}
  std::size_t segment() const { return segment_; }

 private:
  std::size_t segment_;
};

/// Too few samples for the requested resampling or spectral resolution.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A travel-time target outside what the weight bracket can reach.
class BracketError : public Error {
 public:
  BracketError(const std::string& what, double min_time, double max_time)
      : Error(what), min_time_(min_time), max_time_(max_time) {}
  double min_time() const { return min_time_; }
  double max_time() const { return max_time_; }

 private:
  double min_time_;
  double max_time_;
};

/// Two profiles are not time-matched closely enough to be compared.
class ComparabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace smoothride

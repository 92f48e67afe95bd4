#pragma once

#include <stdexcept>
#include <string>

namespace ctomo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Zero matrices, singular inputs, vanishing traces used as scale factors.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NotHermitianError : public Error {
 public:
  using Error::Error;
};

class InvalidObjectError : public Error {
 public:
  using Error::Error;
};

class RankError : public Error {
 public:
  RankError(const std::string& what, long rank, long required)
      : Error(what), rank_(rank), required_(required) {}
  long rank() const { return rank_; }
  long required() const { return required_; }

 private:
  long rank_;
  long required_;
};

class GaugeAmbiguityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctomo

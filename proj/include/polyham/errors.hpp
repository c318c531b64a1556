#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polyham {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::string expected)
      : Error("syntax error at offset " + std::to_string(offset) + ": expected " + expected),
        offset_(offset),
        expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(std::string name, std::size_t offset)
      : Error("unknown identifier '" + name + "'"), name_(std::move(name)), offset_(offset) {}
  const std::string& name() const { return name_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

// Evaluation outside a function's domain; node() is the unparsed offending subexpression.
class DomainError : public Error {
 public:
  DomainError(std::string node, const std::string& why)
      : Error("domain error in '" + node + "': " + why), node_(std::move(node)) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

class SingularMetric : public Error {
 public:
  using Error::Error;
};

class AsymmetricInput : public Error {
 public:
  using Error::Error;
};

class SlotMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroEinsteinConstant : public Error {
 public:
  ZeroEinsteinConstant() : Error("Einstein constant must be nonzero") {}
};

// Two independent routes to the same object disagree beyond tolerance.
class ConsistencyFailure : public Error {
 public:
  using Error::Error;
};

// Invalid model data (dimensions, constants, coordinate dependence).
class ModelError : public Error {
 public:
  using Error::Error;
};

// Config-file errors.
class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace polyham

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pxmp {

/// Base class for every error this library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- expression parsing / evaluation ----------------------------------------

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::string expected)
      : Error("syntax error at byte " + std::to_string(offset) + ": expected " + expected),
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
  explicit UnknownIdentifier(std::string name, std::size_t offset)
      : Error("unknown identifier '" + name + "' at byte " + std::to_string(offset)),
        name_(std::move(name)),
        offset_(offset) {}
  const std::string& name() const { return name_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// -- meshes, fields, norms ---------------------------------------------------

class InvalidSize : public Error {
 public:
  using Error::Error;
};

class MeshMismatch : public Error {
 public:
  using Error::Error;
};

class ExponentOutOfRange : public Error {
 public:
  using Error::Error;
};

class NonZeroTrace : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// -- solvers ------------------------------------------------------------------

class NoConvergence : public Error {
 public:
  NoConvergence(std::string what, int iterations)
      : Error(std::move(what) + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

class NoDescent : public Error {
 public:
  using Error::Error;
};

class CollapsedPath : public Error {
 public:
  using Error::Error;
};

// -- configuration ------------------------------------------------------------

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& reason)
      : Error("config error for '" + key + "': " + reason), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace pxmp

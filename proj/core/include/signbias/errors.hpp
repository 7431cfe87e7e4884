#pragma once

#include <stdexcept>
#include <string>

namespace signbias {

// Base for every error the library reports. Subclasses let callers (and the
// CLI exit-code mapping) distinguish the failure class without string checks.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or malformed column/field in an input table or config file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Dangling reference between tables (unknown participant, gloss, video).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Input outside an operation's domain (empty trajectory, too-small image...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A distribution fit with no usable signal (all-zero samples, one-sided data).
class DegenerateFitError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Shoulder keypoints coincide so the frame cannot be scale-normalized.
class DegenerateFrameError : public DomainError {
 public:
  DegenerateFrameError(std::size_t frame_index, const std::string& what)
      : DomainError(what), frame_index_(frame_index) {}
  std::size_t frame_index() const noexcept { return frame_index_; }

 private:
  std::size_t frame_index_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergenceError : public Error {
 public:
  TrainingDivergenceError(int epoch, const std::string& what)
      : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace signbias

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pinyinasr {

/// Base for every error the library throws on bad input or data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSyllable : public Error {
 public:
  using Error::Error;
};

class InvalidTone : public Error {
 public:
  using Error::Error;
};

class UnknownCharacter : public Error {
 public:
  UnknownCharacter(std::string character, std::size_t position)
      : Error("unknown character '" + character + "' at position " +
              std::to_string(position)),
        character_(std::move(character)),
        position_(position) {}

  const std::string& character() const { return character_; }
  std::size_t position() const { return position_; }

 private:
  std::string character_;
  std::size_t position_;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("empty corpus") {}
};

class InvalidDiscount : public Error {
 public:
  using Error::Error;
};

class MalformedArpa : public Error {
 public:
  MalformedArpa(std::size_t line, const std::string& what)
      : Error("ARPA line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MalformedEmissions : public Error {
 public:
  using Error::Error;
};

class InfeasibleLength : public Error {
 public:
  using Error::Error;
};

class VocabularyMismatch : public Error {
 public:
  using Error::Error;
};

class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

class NoCandidate : public Error {
 public:
  NoCandidate(std::string syllable, std::size_t position)
      : Error("no lexicon character reads '" + syllable + "' (position " +
              std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// A data file failed to parse. Carries the file and 1-based line.
class DataError : public Error {
 public:
  DataError(std::string file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// Bad configuration (missing path, out-of-range setting).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pinyinasr

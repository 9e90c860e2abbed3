#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnemo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Resource file could not be parsed. `line` is 1-based, 0 when not line-specific.
class LoadError : public Error {
 public:
  LoadError(std::string path, std::size_t line, const std::string& what)
      : Error(path + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

class OutOfVocabularyError : public Error {
 public:
  explicit OutOfVocabularyError(std::vector<std::string> tokens)
      : Error(make_message(tokens)), tokens_(std::move(tokens)) {}

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  static std::string make_message(const std::vector<std::string>& tokens) {
    std::string msg = "out of vocabulary:";
    for (const auto& t : tokens) msg += " " + t;
    return msg;
  }
  std::vector<std::string> tokens_;
};

// Caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class DeckError : public Error {
 public:
  using Error::Error;
};

}  // namespace mnemo

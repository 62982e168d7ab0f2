#pragma once

#include <stdexcept>
#include <string>

namespace sttrend {

/// Base of every library error. The category maps onto the CLI exit codes.
class Error : public std::runtime_error {
 public:
  enum class Category { Config = 2, Data = 3, Numerical = 4 };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  Category category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::Config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(Category::Data, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(Category::Numerical, what) {}
};

}  // namespace sttrend

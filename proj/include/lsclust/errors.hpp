#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lsclust {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// A vertex with zero (weighted) degree where a degree normalization is needed.
class IsolatedVertexError : public Error {
 public:
  explicit IsolatedVertexError(std::size_t vertex)
      : Error("vertex " + std::to_string(vertex) + " has zero degree"),
        vertex_(vertex) {}

  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t vertex_;
};

class RankDeficientError : public Error {
 public:
  using Error::Error;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

class EmptySeedError : public Error {
 public:
  EmptySeedError() : Error("seed set is empty") {}
  using Error::Error;
};

class EmptyOmegaError : public Error {
 public:
  EmptyOmegaError() : Error("candidate set is empty") {}
};

/// Every seed of one cluster was removed from the residual graph before its turn.
class SeedConsumedError : public Error {
 public:
  explicit SeedConsumedError(std::size_t cluster)
      : Error("all seeds of cluster " + std::to_string(cluster) +
              " were consumed by earlier extractions"),
        cluster_(cluster) {}

  std::size_t cluster() const noexcept { return cluster_; }

 private:
  std::size_t cluster_;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class AmbiguousIdentityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& where, std::size_t line, const std::string& what)
      : Error(where + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsclust

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace naesat {

// Process exit codes shared by the library error types and the CLI.
enum class ExitCode : int { ok = 0, invalid_input = 2, no_convergence = 3, resource_cap = 4 };

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& w) : Error(ExitCode::invalid_input, w) {}
};
struct NoConvergence : Error {
  explicit NoConvergence(const std::string& w) : Error(ExitCode::no_convergence, w) {}
};
struct ResourceCap : Error {
  explicit ResourceCap(const std::string& w) : Error(ExitCode::resource_cap, w) {}
};

inline constexpr double kLn2 = 0.69314718055994530942;

// 2^(k-1) ln 2: the density scale used by c = alpha / (2^(k-1) ln 2).
inline double density_scale(int k) { return std::ldexp(kLn2, k - 1); }

// Global parameter record of the d-regular k-NAE-SAT model.
struct ModelParams {
  int k = 0;
  long long d = 0;
  long long n = 0;
  long long m = 0;
  double alpha = 0;
  double c = 0;
  long long D = 0;       // d(k-1)
  long long branch = 0;  // (d-1)(k-1)
};

// Throws InvalidInput unless k >= 2, d >= 1, n >= 1 and n*d divisible by k.
ModelParams make_params(int k, long long d, long long n);

// Integer degree closest to the requested normalized density c.
long long degree_for_c(int k, double c);

inline double alpha_of(int k, double d) { return d / k; }
inline double c_of(int k, double d) { return d / k / density_scale(k); }

}  // namespace naesat

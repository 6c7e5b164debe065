// Shared numeric typedefs, error type and search-budget plumbing.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace wittlab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int den(const Rat& r) { return boost::multiprecision::denominator(r); }

// All typed failures carry a stable machine-readable code plus a human message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

// Search budgets.  Every bounded search in the library draws from one of
// these knobs; WITTLAB_BUDGET acts as a global multiplier so that callers can
// trade time for completeness without recompiling.
struct Budget {
  std::int64_t vector_search = 200000;  // candidate vectors per isotropy/representation search
  int atom_product_size = 4;            // max number of atoms multiplied in candidate scalars
  std::int64_t candidate_scalars = 20000;  // cap on scalar candidate pools

  static Budget defaults() {
    Budget b;
    const char* env = std::getenv("WITTLAB_BUDGET");
    if (env != nullptr) {
      double mult = std::atof(env);
      if (mult > 0) {
        b.vector_search = static_cast<std::int64_t>(b.vector_search * mult);
        b.candidate_scalars = static_cast<std::int64_t>(b.candidate_scalars * mult);
      }
    }
    return b;
  }
};

inline const Budget& budget() {
  static Budget b = Budget::defaults();
  return b;
}

}  // namespace wittlab

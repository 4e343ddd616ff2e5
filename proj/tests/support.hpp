#pragma once

#include <vector>

#include "doctest.h"
#include "vlgreedy/error.hpp"
#include "vlgreedy/exponent_field.hpp"

#define CHECK_ERROR_KIND(expr, k)                          \
  do {                                                     \
    bool caught_ = false;                                  \
    try {                                                  \
      (void)(expr);                                        \
    } catch (const vlg::Error& e_) {                       \
      caught_ = true;                                      \
      CHECK_MESSAGE(e_.kind() == (k), e_.what());          \
    }                                                      \
    CHECK_MESSAGE(caught_, "expected an error: " #expr);   \
  } while (0)

namespace testing {

// p = 2 on [0,1/2), 4 on [1/2,1) in the first axis.
inline vlg::ExponentField two_four(int dim, int depth) {
  vlg::PiecewiseExponent pw;
  std::vector<double> lo(dim, 0.0), mid_lo(dim, 0.0), hi(dim, 1.0), mid_hi(dim, 1.0);
  mid_hi[0] = 0.5;
  mid_lo[0] = 0.5;
  pw.pieces.push_back({lo, mid_hi, 2.0});
  pw.pieces.push_back({mid_lo, hi, 4.0});
  return vlg::build_exponent(vlg::Grid(dim, depth), pw);
}

inline vlg::ExponentField constant(int dim, int depth, double q) {
  return vlg::build_exponent(vlg::Grid(dim, depth), vlg::ConstantExponent{q});
}

inline std::vector<double> exponents_of(const vlg::ExponentField& p) {
  return {p.values().begin(), p.values().end()};
}

}  // namespace testing

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subspect::nn {

struct GradCheckCase {
  std::string name;
  int instances = 0;
  double max_rel_err = 0;
  bool pass = false;
};

inline constexpr double kGradCheckEps = 1e-4;        // central-difference step
inline constexpr double kGradCheckTol = 1e-4;        // relative-error bound
inline constexpr double kGradCheckFloor = 1e-2;      // |a-n|/max(|a|,|n|,floor)

// Central finite-difference checks in 64-bit mode for every layer, both loss
// functions, and end-to-end tiny instances of all four architectures.
std::vector<GradCheckCase> run_gradient_checks(int instances_per_case,
                                               uint64_t seed);

bool all_passed(const std::vector<GradCheckCase>& cases);
void print_report(const std::vector<GradCheckCase>& cases, std::ostream& os);

}  // namespace subspect::nn

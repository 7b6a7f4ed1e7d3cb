#pragma once

// CPLEX-style LP text files: export for external solvers, import of the
// same subset (linear objective and rows, bounds, binaries), and a plain
// "name value" solution file for cross-checking.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "stes/milp.hpp"
#include "stes/solver.hpp"

namespace stes {

// Output is a pure function of the instance: rows and variables in instance
// order, numbers in shortest round-trip form.
void write_lp(std::ostream& out, const MilpInstance& inst);
std::string to_lp_string(const MilpInstance& inst);

// Throws InputError with the offending line number on malformed input.
// General-integer sections are rejected. A maximization objective is negated
// into a minimization. Row kinds are recovered from the builder's name
// prefixes where they match.
MilpInstance read_lp(std::istream& in);

struct SolutionFile {
  std::string status;
  double objective = 0.0;
  std::map<std::string, double> values;
};

void write_solution(std::ostream& out, const MilpInstance& inst,
                    const SolveResult& result);
SolutionFile read_solution(std::istream& in);

// Values in the instance's variable order. Throws InputError if a variable
// is missing from the file.
std::vector<double> align_solution(const SolutionFile& sol,
                                   const MilpInstance& inst);

RowKind row_kind_from_name(const std::string& name);

}  // namespace stes

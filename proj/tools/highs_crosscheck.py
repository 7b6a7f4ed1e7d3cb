#!/usr/bin/env python3
"""Solve an LP file with HiGHS and write a solution file.

Usage: highs_crosscheck.py MODEL.lp SOLUTION.txt

The solution file has the same layout as the one written by the C++
library: "# status <s>", "# objective <v>", then one "name value" line per
column. Exit code 0 on an optimal solve, 2 if the model is infeasible, 1 on
any other outcome, 3 if highspy is not installed.
"""

import sys


def main(argv):
    if len(argv) != 3:
        print(__doc__, file=sys.stderr)
        return 1
    try:
        import highspy
    except ImportError:
        print("highspy is not installed", file=sys.stderr)
        return 3

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("dual_feasibility_tolerance", 1e-9)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    status = h.readModel(argv[1])
    if status != highspy.HighsStatus.kOk:
        print(f"cannot read {argv[1]}", file=sys.stderr)
        return 1
    h.run()
    model_status = h.getModelStatus()
    if model_status == highspy.HighsModelStatus.kInfeasible:
        with open(argv[2], "w") as out:
            out.write("# status infeasible\n")
        return 2
    if model_status != highspy.HighsModelStatus.kOptimal:
        print(f"HiGHS ended with {h.modelStatusToString(model_status)}",
              file=sys.stderr)
        return 1

    lp = h.getLp()
    names = list(lp.col_names_)
    values = list(h.getSolution().col_value)
    objective = h.getInfo().objective_function_value
    with open(argv[2], "w") as out:
        out.write("# status optimal\n")
        out.write(f"# objective {objective!r}\n")
        for name, value in zip(names, values):
            out.write(f"{name} {value!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))

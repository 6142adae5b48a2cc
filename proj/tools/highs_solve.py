#!/usr/bin/env python3
"""Solve an LP-format file with HiGHS and print `name value` lines.

usage: highs_solve.py MODEL.lp [OUT]
"""
import sys

import highspy


def main(argv):
    if len(argv) < 2:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    if h.readModel(argv[1]) != highspy.HighsStatus.kOk:
        print("cannot read " + argv[1], file=sys.stderr)
        return 2
    h.run()
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        print("status: " + h.modelStatusToString(h.getModelStatus()), file=sys.stderr)
        return 3
    lp = h.getLp()
    values = h.getSolution().col_value
    lines = ["objective %.6f" % h.getInfo().objective_function_value]
    for name, v in zip(lp.col_names_, values):
        lines.append("%s %.6f" % (name, v))
    text = "\n".join(lines) + "\n"
    if len(argv) > 2:
        with open(argv[2], "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))

#!/usr/bin/env python3
"""Emit src/lebedev_tables.inc from the Lebedev-Laikov generator parameters.

The parameters are read from SciPy's translation of the Lebedev-Laikov
routines (scipy/integrate/_lebedev.py). Only the orbit generators
(type, a, b, v) are stored; the C++ side expands the octahedral orbits.

usage: gen_lebedev_tables.py [output]
"""
import inspect
import re
import sys

import scipy.integrate._lebedev as leb

ORDERS = {6: 3, 14: 5, 26: 7, 38: 9, 50: 11, 74: 13, 86: 15, 110: 17,
          146: 19, 170: 21, 194: 23, 230: 25, 266: 27, 302: 29, 350: 31,
          434: 35, 590: 41, 770: 47, 974: 53, 1202: 59, 1454: 65, 1730: 71,
          2030: 77, 2354: 83, 2702: 89, 3074: 95, 3470: 101, 3890: 107,
          4334: 113, 4802: 119, 5294: 125, 5810: 131}
ORBIT = {1: 6, 2: 12, 3: 8, 4: 24, 5: 24, 6: 48}


def parse(src):
    rules = {}
    current = None
    a = b = v = 0.0
    for line in src.splitlines():
        s = line.strip()
        m = re.match(r"case (\d+):$", s)
        if m and int(m.group(1)) in ORDERS and line.startswith("        case"):
            current = int(m.group(1))
            rules[current] = []
            a = b = v = 0.0
            continue
        if current is None:
            continue
        m = re.match(r"([abv]) = (\S+)$", s)
        if m:
            val = m.group(2)
            if m.group(1) == "a":
                a = val
            elif m.group(1) == "b":
                b = val
            else:
                v = val
            continue
        m = re.match(r"leb_tmp, start = get_lebedev_recurrence_points\((\d), ", s)
        if m:
            rules[current].append((int(m.group(1)), a, b, v))
    return rules


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "src/lebedev_tables.inc"
    rules = parse(inspect.getsource(leb.get_lebedev_sphere))
    with open(out, "w") as f:
        f.write("// Generated by tools/gen_lebedev_tables.py. Do not edit.\n")
        f.write("// Lebedev-Laikov orbit generators: {type, a, b, v}.\n\n")
        for n, gens in sorted(rules.items()):
            count = sum(ORBIT[t] for t, *_ in gens)
            assert count == n, (n, count)
            f.write(f"constexpr OrbitGenerator kRule{n}[] = {{\n")
            for t, a, b, v in gens:
                f.write(f"    {{{t}, {a or '0.0'}, {b or '0.0'}, {v}}},\n")
            f.write("};\n\n")
        f.write("constexpr RuleTable kRuleTables[] = {\n")
        for n in sorted(rules):
            f.write(f"    {{{n}, {ORDERS[n]}, kRule{n}}},\n")
        f.write("};\n")


if __name__ == "__main__":
    main()

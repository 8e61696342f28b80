#!/usr/bin/env python3
"""Exact (projected) model counter front end for the GANAK Python bindings.

Usage: ganak_count.py FILE.cnf
Reads DIMACS, honours "c p show v1 v2 ... 0" projection lines and prints
"s mc <count>".
"""
import sys

import pyganak


def main(argv):
    if len(argv) != 2:
        print("usage: ganak_count.py FILE.cnf", file=sys.stderr)
        return 2
    nvars = 0
    clauses, show = [], None
    current = []
    with open(argv[1]) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("c p show"):
                show = show or []
                show.extend(int(v) for v in line.split()[3:] if v != "0")
                continue
            if line[0] == "c":
                continue
            if line[0] == "p":
                nvars = int(line.split()[2])
                continue
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    clauses.append(current)
                    current = []
                else:
                    current.append(lit)
    if current:
        clauses.append(current)
    if any(len(c) == 0 for c in clauses):
        print("s mc 0")
        return 0
    counter = pyganak.Counter()
    if nvars:
        counter.new_vars(nvars)
    counter.add_clauses(clauses)
    if show is not None:
        counter.set_sampling_set(show)
    print("s mc %d" % counter.count())
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))

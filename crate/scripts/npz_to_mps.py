#!/usr/bin/env python3
"""Convert scipy's linprog benchmark archives (NETLIB LPs stored as .npz) to MPS.

Usage: npz_to_mps.py <npz-dir> <out-dir> NAME [NAME ...]

Inequality rows become L rows, equality rows E rows. Fixed-format MPS is
written when every number fits its 12-character field exactly, otherwise
free format.
"""
import sys
from pathlib import Path

import numpy as np


def fmt(v):
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def convert(path, name):
    d = np.load(path, allow_pickle=True)
    c = d["c"]
    a_ub, b_ub, a_eq, b_eq = d["A_ub"], d["b_ub"], d["A_eq"], d["b_eq"]
    n = len(c)
    rows = [(f"R{i + 1:04d}", "L", a_ub[i], b_ub[i]) for i in range(a_ub.shape[0])]
    rows += [(f"E{i + 1:04d}", "E", a_eq[i], b_eq[i]) for i in range(a_eq.shape[0])]
    cols = [f"C{j + 1:04d}" for j in range(n)]
    bounds = d["bounds"]
    if bounds.size:
        bounds = [tuple(bb) for bb in bounds.reshape(-1, 2)]
    else:
        bounds = [(0.0, None)] * n

    records = []  # (kind, f1, f2, f3, v3)
    for j in range(n):
        if c[j] != 0:
            records.append(("COL", cols[j], "COST", c[j]))
        for rn, _, row, _ in rows:
            if row[j] != 0:
                records.append(("COL", cols[j], rn, row[j]))
    rhs = [("RHS", "RHS", rn, v) for rn, _, _, v in rows if v != 0]
    bnd = []
    for j, (lo, hi) in enumerate(bounds):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        if lo == 0.0 and hi == np.inf:
            continue
        if lo == hi:
            bnd.append(("FX", cols[j], lo))
            continue
        if lo == -np.inf and hi == np.inf:
            bnd.append(("FR", cols[j], None))
            continue
        if lo == -np.inf:
            bnd.append(("MI", cols[j], None))
        elif lo != 0.0:
            bnd.append(("LO", cols[j], lo))
        if hi != np.inf:
            bnd.append(("UP", cols[j], hi))

    numbers = [r[3] for r in records] + [r[3] for r in rhs] + [b[2] for b in bnd if b[2] is not None]
    fixed = all(len(fmt(v)) <= 12 for v in numbers)

    out = [f"NAME          {name.upper()}", "ROWS", " N  COST"]
    out += [f" {s}  {rn}" for rn, s, _, _ in rows]
    out.append("COLUMNS")
    for _, f1, f2, v in records:
        out.append(f"    {f1:<8}  {f2:<8}  {fmt(v):>12}" if fixed else f" {f1} {f2} {fmt(v)}")
    out.append("RHS")
    for _, f1, f2, v in rhs:
        out.append(f"    {f1:<8}  {f2:<8}  {fmt(v):>12}" if fixed else f" {f1} {f2} {fmt(v)}")
    if bnd:
        out.append("BOUNDS")
        for kind, col, v in bnd:
            if fixed:
                line = f" {kind:<2} BND       {col:<8}"
                if v is not None:
                    line += f"  {fmt(v):>12}"
            else:
                line = f" {kind} BND {col}" + ("" if v is None else f" {fmt(v)}")
            out.append(line)
    out.append("ENDATA")
    return "\n".join(out) + "\n", fixed


def main():
    src, dst = Path(sys.argv[1]), Path(sys.argv[2])
    for name in sys.argv[3:]:
        text, fixed = convert(src / f"{name.upper()}.npz", name.lower())
        (dst / f"{name.lower()}.mps").write_text(text)
        print(name, "fixed" if fixed else "free")


if __name__ == "__main__":
    main()

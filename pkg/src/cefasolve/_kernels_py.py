"""Pure-Python reference implementations of the compiled kernels."""

from __future__ import annotations

from math import gcd


def combine(row: dict[int, int], rhs: int, m: int, prow: dict[int, int], prhs: int,
            f: int) -> tuple[dict[int, int], int]:
    """Sparse ``m * row - f * prow`` (and the same on the right-hand sides)."""
    new = {j: v * m for j, v in row.items()} if m != 1 else dict(row)
    get = new.get
    for j, v in prow.items():
        x = get(j, 0) - f * v
        if x:
            new[j] = x
        else:
            new.pop(j, None)
    return new, rhs * m - f * prhs


def eliminate_column(rows: list[dict[int, int]], rhs: list[int], den: list[int],
                     r: int, c: int) -> None:
    """Clear column ``c`` from every row but ``r`` in place, keeping rows in lowest terms."""
    prow = rows[r]
    p = prow[c]
    prhs = rhs[r]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row.get(c)
        if not f:
            continue
        new, nrhs = combine(row, rhs[i], p, prow, prhs, f)
        d = den[i] * p
        g = gcd(d, nrhs, *new.values())
        if g > 1:
            new = {j: v // g for j, v in new.items()}
            nrhs //= g
            d //= g
        rows[i] = new
        rhs[i] = nrhs
        den[i] = d

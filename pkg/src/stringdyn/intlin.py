"""Exact integer linear algebra: Hermite and Smith normal forms, kernels, solving.

Matrices are lists of rows of Python ints, so every operation is arbitrary
precision by construction. Conventions used throughout the package:

* ``hnf`` is row-style: pivots positive, entries above a pivot reduced into
  ``[0, pivot)``, zero rows dropped, rows ordered by pivot column. The output
  is the unique canonical basis of the input's row lattice.
* ``smith`` returns ``(U, S, V)`` with ``S = U * M * V`` diagonal,
  ``S[0][0] | S[1][1] | ...`` and ``U``, ``V`` unimodular.
* Linear maps act on column vectors: ``solve(M, b)`` finds ``x`` with
  ``M x = b`` and ``kernel(M)`` spans ``{x : M x = 0}``.

Lattices (free subgroups of Z^n) are handled as row sets; ``intersect_rows``,
``saturate_rows`` and ``coords_in_basis`` provide the subgroup arithmetic the
group layer is built on.
"""

from __future__ import annotations

from .errors import DimensionMismatch

Vec = list[int]
Mat = list[list[int]]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) >= 0`` and ``s*a + t*b = g``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def identity(n: int) -> Mat:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Mat:
    return [[0] * n for _ in range(m)]


def transpose(m: Mat) -> Mat:
    if not m:
        return []
    return [[row[j] for row in m] for j in range(len(m[0]))]


def mat_mul(a: Mat, b: Mat) -> Mat:
    if not a or not b:
        return []
    cols = len(b[0])
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(m: Mat, v: Vec) -> Vec:
    return [sum(x * y for x, y in zip(row, v)) for row in m]


def vec_mat(v: Vec, m: Mat) -> Vec:
    """Row vector times matrix: ``v @ m``."""
    if not m:
        return []
    n = len(m[0])
    out = [0] * n
    for c, row in zip(v, m):
        if c:
            for j in range(n):
                out[j] += c * row[j]
    return out


def mat_eq(a: Mat, b: Mat) -> bool:
    return a == b


def det(m: Mat) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionMismatch("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _pivot_cols(rows: Mat) -> list[int]:
    piv = []
    for row in rows:
        for j, x in enumerate(row):
            if x:
                piv.append(j)
                break
    return piv


def hnf(rows: Mat, n: int | None = None) -> Mat:
    """Canonical row-style Hermite normal form of the row lattice of ``rows``.

    Pivots are positive, entries above each pivot lie in ``[0, pivot)`` and
    zero rows are dropped, so equal lattices yield identical outputs.
    """
    work = [list(r) for r in rows if any(r)]
    if n is None:
        n = len(rows[0]) if rows else 0
    for r in work:
        if len(r) != n:
            raise DimensionMismatch("ragged rows in hnf input")
    r = 0
    for col in range(n):
        while True:
            nz = [i for i in range(r, len(work)) if work[i][col]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(work[i][col]))
            work[r], work[i0] = work[i0], work[r]
            if work[r][col] < 0:
                work[r] = [-x for x in work[r]]
            clean = True
            p = work[r][col]
            for i in range(r + 1, len(work)):
                if work[i][col]:
                    q = work[i][col] // p
                    work[i] = [x - q * y for x, y in zip(work[i], work[r])]
                    if work[i][col]:
                        clean = False
            if clean:
                r += 1
                break
    work = [row for row in work[:r] if any(row)]
    # Reduce entries above each pivot into [0, pivot). Ascending order is
    # required: row i has zeros at all earlier pivot columns, so reducing at
    # piv[i] cannot disturb columns already normalized.
    piv = _pivot_cols(work)
    for i in range(len(work)):
        c = piv[i]
        p = work[i][c]
        for j in range(i):
            q = work[j][c] // p
            if q:
                work[j] = [x - q * y for x, y in zip(work[j], work[i])]
    return work


def reduce_mod_rows(v: Vec, hnf_rows: Mat) -> Vec:
    """Canonical representative of ``v`` modulo the lattice spanned by ``hnf_rows``.

    ``hnf_rows`` must be in row HNF; the result has its entry at every pivot
    column reduced into ``[0, pivot)``.
    """
    out = list(v)
    for row, c in zip(hnf_rows, _pivot_cols(hnf_rows)):
        q = out[c] // row[c]
        if q:
            out = [x - q * y for x, y in zip(out, row)]
    return out


def in_row_lattice(v: Vec, hnf_rows: Mat) -> bool:
    return not any(reduce_mod_rows(v, hnf_rows))


def smith(m: Mat) -> tuple[Mat, Mat, Mat]:
    """Smith normal form with transforms: returns ``(U, S, V)``, ``S = U m V``.

    ``U`` and ``V`` are unimodular, ``S`` is diagonal with non-negative
    entries satisfying ``S[i][i] | S[i+1][i+1]``. Total on any integer
    matrix, including empty ones. The identity ``S = U m V`` is re-checked
    before returning.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    s = [row[:] for row in m]
    u = identity(rows)
    v = identity(cols)

    def row_op(i: int, j: int, q: int) -> None:  # row_i -= q * row_j
        s[i] = [x - q * y for x, y in zip(s[i], s[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i: int, j: int, q: int) -> None:  # col_i -= q * col_j
        for row in s:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def swap_rows(i: int, j: int) -> None:
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def negate_row(i: int) -> None:
        s[i] = [-x for x in s[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(rows, cols):
        # Move a nonzero entry of minimal magnitude in the trailing block to (t, t).
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if s[i][j] and (best is None or abs(s[i][j]) < abs(s[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            # Clear column t, restarting with a smaller pivot when a remainder shows.
            again = False
            for i in range(t + 1, rows):
                if s[i][t]:
                    q = s[i][t] // s[t][t]
                    row_op(i, t, q)
                    if s[i][t]:
                        swap_rows(t, i)
                        again = True
            if again:
                continue
            for j in range(t + 1, cols):
                if s[t][j]:
                    q = s[t][j] // s[t][t]
                    col_op(j, t, q)
                    if s[t][j]:
                        swap_cols(t, j)
                        again = True
            if not again:
                break
        if s[t][t] < 0:
            negate_row(t)
        # Divisibility fix-up: fold a non-multiple into the pivot position.
        bad = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if s[i][j] % s[t][t]:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            row_op(t, bad, -1)
            continue
        t += 1
    assert mat_eq(mat_mul(mat_mul(u, m), v) if rows and cols else s, s), "smith transform mismatch"
    return u, s, v


def smith_diagonal(s: Mat) -> list[int]:
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0))]


def solve(m: Mat, b: Vec) -> Vec | None:
    """One integer solution ``x`` of ``M x = b``, or ``None``."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if len(b) != rows:
        raise DimensionMismatch("solve: rhs length disagrees with matrix")
    if cols == 0:
        return [] if not any(b) else None
    u, s, v = smith(m)
    w = mat_vec(u, b)
    diag = smith_diagonal(s)
    y = [0] * cols
    for i in range(rows):
        si = diag[i] if i < len(diag) else 0
        if si:
            if w[i] % si:
                return None
            y[i] = w[i] // si
        elif w[i]:
            return None
    return mat_vec(v, y)


def kernel(m: Mat, cols: int | None = None) -> Mat:
    """HNF basis rows of the right kernel ``{x : M x = 0}``.

    The result is automatically saturated (integer kernels are pure).
    """
    rows = len(m)
    if cols is None:
        cols = len(m[0]) if rows else 0
    if rows == 0:
        return identity(cols)
    u, s, v = smith(m)
    diag = smith_diagonal(s)
    free = [j for j in range(cols) if j >= len(diag) or diag[j] == 0]
    basis = [[v[i][j] for i in range(cols)] for j in free]
    return hnf(basis, cols)


def intersect_rows(a: Mat, b: Mat, n: int) -> Mat:
    """HNF basis of (row lattice of a) intersected with (row lattice of b)."""
    if not a or not b:
        return []
    big = [[a[j][i] for j in range(len(a))] + [-b[j][i] for j in range(len(b))]
           for i in range(n)]
    ker = kernel(big, len(a) + len(b))
    out = [vec_mat(y[: len(a)], a) for y in ker]
    return hnf(out, n)


def saturate_rows(rows: Mat, n: int) -> Mat:
    """HNF basis of the saturation (rational row span intersected with Z^n)."""
    if not rows:
        return []
    nullsp = kernel(rows, n)
    if not nullsp:
        return identity(n)
    return kernel(nullsp, n)


def coords_in_basis(v: Vec, basis_rows: Mat) -> Vec | None:
    """Coordinates ``x`` with ``x @ basis_rows = v``, or ``None``."""
    if not basis_rows:
        return [] if not any(v) else None
    return solve(transpose(basis_rows), v)


def lattice_index(sub_rows: Mat, super_rows: Mat) -> int | None:
    """Index of the lattice of ``sub_rows`` inside that of ``super_rows``.

    Both in HNF, same rank required for a finite answer; ``None`` means the
    index is infinite (rank drop). Raises if ``sub`` is not contained.
    """
    coords = []
    for row in sub_rows:
        c = coords_in_basis(row, super_rows)
        if c is None:
            raise DimensionMismatch("lattice_index: not a sublattice")
        coords.append(c)
    if len(sub_rows) != len(super_rows):
        return None
    d = det(coords)
    return abs(d) if d else None


def poly_eval_matrix(coeffs_high_first: list[int], a: Mat) -> Mat:
    """Evaluate an integer polynomial at a square matrix (Horner)."""
    n = len(a)
    out = zeros(n, n)
    for c in coeffs_high_first:
        out = mat_mul(out, a) if n else []
        for i in range(n):
            out[i][i] += c
    return out


def charpoly(a: Mat) -> list[int]:
    """Characteristic polynomial of an integer matrix, coefficients highest first.

    Faddeev-LeVerrier; every interior division is exact and asserted.
    """
    n = len(a)
    coeffs = [1]
    m = zeros(n, n)
    for k in range(1, n + 1):
        for i in range(n):
            m[i][i] += coeffs[-1]
        m = mat_mul(a, m)
        tr = sum(m[i][i] for i in range(n))
        assert tr % k == 0, "Faddeev-LeVerrier trace not divisible"
        coeffs.append(-tr // k)
    return coeffs

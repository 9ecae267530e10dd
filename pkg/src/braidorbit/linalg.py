"""Exact dense and sparse linear algebra over the scalar fraction field.

Dense matrices (``MatrixS``) are used for operators on small tensor powers;
``TensorOp`` adds the multi-index bookkeeping for operators on V^(tensor k).
Large rank/membership problems (relation ideals, Poincare series) run on the
sparse ``RowSpace``, an incrementally maintained reduced row echelon form.
The echelon basis of a span is unique, so residuals of reduction are
canonical and independent of the order in which spanning vectors arrive.

Pivoting is deterministic everywhere: columns are scanned left to right and
the first nonzero candidate wins.  ``bareiss`` does fraction-free elimination
over cleared (polynomial) entries for determinants, and ordinary exact field
elimination for the other tasks.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    DimensionMismatch,
    DivisionByZero,
    IndexOutOfRange,
    ResourceLimit,
    SingularMatrix,
)
from .scalar import Poly, Scalar, SymbolTable, poly_div_exact, poly_lcm

_ENTRY_CAP = 800_000_000


def set_entry_cap(cap: int) -> None:
    global _ENTRY_CAP
    _ENTRY_CAP = cap


def _check_alloc(entries: int) -> None:
    if entries > _ENTRY_CAP:
        raise ResourceLimit(f"allocation of {entries} entries exceeds cap {_ENTRY_CAP}")


class MatrixS:
    """Dense matrix of Scalars (row-major)."""

    __slots__ = ("nrows", "ncols", "table", "data")

    def __init__(self, table: SymbolTable, data: Sequence[Sequence[Scalar]]):
        self.table = table
        self.data = [list(row) for row in data]
        self.nrows = len(self.data)
        self.ncols = len(self.data[0]) if self.data else 0
        for row in self.data:
            if len(row) != self.ncols:
                raise DimensionMismatch("ragged rows")

    @staticmethod
    def zeros(table: SymbolTable, nrows: int, ncols: int) -> "MatrixS":
        _check_alloc(nrows * ncols)
        z = Scalar.zero(table)
        return MatrixS(table, [[z] * ncols for _ in range(nrows)])

    @staticmethod
    def identity(table: SymbolTable, n: int) -> "MatrixS":
        m = MatrixS.zeros(table, n, n)
        one = Scalar.one(table)
        for i in range(n):
            m.data[i][i] = one
        return m

    def copy(self) -> "MatrixS":
        return MatrixS(self.table, self.data)

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self.data[i][j]

    def set(self, i: int, j: int, value: Scalar) -> None:
        self.data[i][j] = value

    def __add__(self, other: "MatrixS") -> "MatrixS":
        self._same_shape(other)
        return MatrixS(self.table, [[a + b for a, b in zip(ra, rb)]
                                    for ra, rb in zip(self.data, other.data)])

    def __sub__(self, other: "MatrixS") -> "MatrixS":
        self._same_shape(other)
        return MatrixS(self.table, [[a - b for a, b in zip(ra, rb)]
                                    for ra, rb in zip(self.data, other.data)])

    def _same_shape(self, other: "MatrixS") -> None:
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("shape mismatch")

    def __mul__(self, other: "MatrixS") -> "MatrixS":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.ncols} != {other.nrows}")
        _check_alloc(self.nrows * other.ncols)
        zero = Scalar.zero(self.table)
        out = [[zero] * other.ncols for _ in range(self.nrows)]
        bdata = other.data
        for i, arow in enumerate(self.data):
            orow = out[i]
            for k, a in enumerate(arow):
                if not a:
                    continue
                brow = bdata[k]
                for j, b in enumerate(brow):
                    if b:
                        orow[j] = orow[j] + a * b
        return MatrixS(self.table, out)

    def scale(self, c: Scalar) -> "MatrixS":
        return MatrixS(self.table, [[c * a for a in row] for row in self.data])

    def transpose(self) -> "MatrixS":
        return MatrixS(self.table, [list(col) for col in zip(*self.data)])

    def trace(self) -> Scalar:
        if self.nrows != self.ncols:
            raise DimensionMismatch("trace of non-square matrix")
        t = Scalar.zero(self.table)
        for i in range(self.nrows):
            t = t + self.data[i][i]
        return t

    def is_zero(self) -> bool:
        return all(not a for row in self.data for a in row)

    def __eq__(self, other) -> bool:
        return (isinstance(other, MatrixS) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.data == other.data)

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(str(a) for a in row) for row in self.data)
        return f"MatrixS[{rows}]"

    def kron(self, other: "MatrixS") -> "MatrixS":
        _check_alloc(self.nrows * other.nrows * self.ncols * other.ncols)
        zero = Scalar.zero(self.table)
        out = [[zero] * (self.ncols * other.ncols)
               for _ in range(self.nrows * other.nrows)]
        for i, arow in enumerate(self.data):
            for j, a in enumerate(arow):
                if not a:
                    continue
                for k, brow in enumerate(other.data):
                    for l, b in enumerate(brow):
                        if b:
                            out[i * other.nrows + k][j * other.ncols + l] = a * b
        return MatrixS(self.table, out)


def kron(a: MatrixS, b: MatrixS) -> MatrixS:
    return a.kron(b)


# ---------------------------------------------------------------------------
# tensor operators
# ---------------------------------------------------------------------------


class TensorOp:
    """Operator on V^(tensor k), dim V = N, stored as an N^k x N^k matrix.

    Row/column multi-indices (i1..ik) are encoded big-endian:
    code = i1*N^(k-1) + ... + ik, each i in [0, N).
    """

    __slots__ = ("N", "arity", "mat")

    def __init__(self, N: int, arity: int, mat: MatrixS):
        if mat.nrows != N ** arity or mat.ncols != N ** arity:
            raise DimensionMismatch(f"matrix size {mat.nrows} != {N}^{arity}")
        self.N = N
        self.arity = arity
        self.mat = mat

    @staticmethod
    def identity(table: SymbolTable, N: int, arity: int) -> "TensorOp":
        return TensorOp(N, arity, MatrixS.identity(table, N ** arity))

    @property
    def table(self) -> SymbolTable:
        return self.mat.table

    def __mul__(self, other: "TensorOp") -> "TensorOp":
        if self.N != other.N or self.arity != other.arity:
            raise DimensionMismatch("tensor arity mismatch")
        return TensorOp(self.N, self.arity, self.mat * other.mat)

    def __add__(self, other: "TensorOp") -> "TensorOp":
        return TensorOp(self.N, self.arity, self.mat + other.mat)

    def __sub__(self, other: "TensorOp") -> "TensorOp":
        return TensorOp(self.N, self.arity, self.mat - other.mat)

    def scale(self, c: Scalar) -> "TensorOp":
        return TensorOp(self.N, self.arity, self.mat.scale(c))

    def is_zero(self) -> bool:
        return self.mat.is_zero()

    def __eq__(self, other) -> bool:
        return (isinstance(other, TensorOp) and self.N == other.N
                and self.arity == other.arity and self.mat == other.mat)


def embed_at(op: TensorOp, position: int, arity: int) -> TensorOp:
    """I^(pos-1) (x) op (x) I^(arity-pos-oparity+1): op acting at `position`.

    `position` is 1-based; the embedded operator acts on tensor factors
    position..position+op.arity-1 of V^(tensor arity).
    """
    k = op.arity
    if position < 1 or position + k - 1 > arity:
        raise IndexOutOfRange(f"position {position} with arity {k} in {arity} factors")
    N = op.N
    left = N ** (position - 1)
    mid = N ** k
    right = N ** (arity - position - k + 1)
    _check_alloc((left * mid * right) ** 2)
    table = op.table
    out = MatrixS.zeros(table, left * mid * right, left * mid * right)
    mdata = op.mat.data
    for a in range(left):
        for c in range(right):
            for rm in range(mid):
                row = (a * mid + rm) * right + c
                src = mdata[rm]
                for cm in range(mid):
                    v = src[cm]
                    if v:
                        col = (a * mid + cm) * right + c
                        out.data[row][col] = v
    return TensorOp(N, arity, out)


def partial_trace(op: TensorOp, space: int) -> TensorOp:
    """Contract the `space`-th (1-based) tensor factor; arity drops by one."""
    k = op.arity
    if space < 1 or space > k:
        raise IndexOutOfRange(f"space {space} of {k}")
    N = op.N
    left = N ** (space - 1)
    right = N ** (k - space)
    table = op.table
    out = MatrixS.zeros(table, left * right, left * right)
    mdata = op.mat.data
    for ra in range(left):
        for rc in range(right):
            row_out = ra * right + rc
            orow = out.data[row_out]
            for ca in range(left):
                for cc in range(right):
                    col_out = ca * right + cc
                    acc = orow[col_out]
                    for t in range(N):
                        r = (ra * N + t) * right + rc
                        c = (ca * N + t) * right + cc
                        v = mdata[r][c]
                        if v:
                            acc = acc + v
                    orow[col_out] = acc
    return TensorOp(N, k - 1, out)


def flip_op(table: SymbolTable, N: int) -> TensorOp:
    """The plain flip sigma(e_i (x) e_j) = e_j (x) e_i."""
    m = MatrixS.zeros(table, N * N, N * N)
    one = Scalar.one(table)
    for i in range(N):
        for j in range(N):
            m.data[j * N + i][i * N + j] = one
    return TensorOp(N, 2, m)


# ---------------------------------------------------------------------------
# elimination: Bareiss (fraction-free) and field Gaussian
# ---------------------------------------------------------------------------


def _clear_rows(m: MatrixS) -> tuple[list, Scalar]:
    """Clear denominators row by row; return (Poly rows, product of row factors)."""
    table = m.table
    rows = []
    factor = Scalar.one(table)
    for row in m.data:
        common = Poly.const(table, 1)
        for a in row:
            if not a.den.is_constant():
                common = poly_lcm(common, a.den)
        cleared = []
        for a in row:
            mult = poly_div_exact(common, a.den)
            cleared.append(a.num * mult)
        rows.append(cleared)
        factor = factor * Scalar.make(common, Poly.const(table, 1))
    return rows, factor


def det_bareiss(m: MatrixS) -> Scalar:
    """Exact determinant by one-step fraction-free (Bareiss) elimination."""
    if m.nrows != m.ncols:
        raise DimensionMismatch("determinant of non-square matrix")
    n = m.nrows
    table = m.table
    if n == 0:
        return Scalar.one(table)
    rows, factor = _clear_rows(m)
    sign = 1
    prev = Poly.const(table, 1)
    for k in range(n - 1):
        piv = None
        for r in range(k, n):
            if not rows[r][k].is_zero():
                piv = r
                break
        if piv is None:
            return Scalar.zero(table)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            sign = -sign
        pivot = rows[k][k]
        for i in range(k + 1, n):
            ri = rows[i]
            rk = rows[k]
            head = ri[k]
            for j in range(k + 1, n):
                num = ri[j] * pivot - head * rk[j]
                q = poly_div_exact(num, prev)
                if q is None:
                    raise ArithmeticError("Bareiss division not exact")
                ri[j] = q
            ri[k] = Poly.zero(table)
        prev = pivot
    det_poly = rows[n - 1][n - 1]
    det = Scalar.make(det_poly if sign > 0 else -det_poly, Poly.const(table, 1))
    return det / factor


def rowreduce(m: MatrixS) -> tuple[MatrixS, list, int, list]:
    """Reduced row echelon form with the fixed left-to-right pivot scan.

    Returns (rref, pivot column list, swap sign, pivot values as encountered).
    """
    data = [list(row) for row in m.data]
    table = m.table
    nrows, ncols = m.nrows, m.ncols
    pivots = []
    pivot_values = []
    sign = 1
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if data[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            data[r], data[piv] = data[piv], data[r]
            sign = -sign
        pv = data[r][c]
        pivot_values.append(pv)
        inv = pv.inv()
        data[r] = [inv * x for x in data[r]]
        for i in range(nrows):
            if i != r and data[i][c]:
                f = data[i][c]
                data[i] = [a - f * b for a, b in zip(data[i], data[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return MatrixS(table, data), pivots, sign, pivot_values


def rank(m: MatrixS) -> int:
    return len(rowreduce(m)[1])


def nullspace(m: MatrixS) -> list:
    """Basis of the right kernel, as lists of Scalars."""
    rref, pivots, _, _ = rowreduce(m)
    table = m.table
    free = [c for c in range(m.ncols) if c not in pivots]
    basis = []
    zero = Scalar.zero(table)
    one = Scalar.one(table)
    for fc in free:
        vec = [zero] * m.ncols
        vec[fc] = one
        for r, pc in enumerate(pivots):
            vec[pc] = -rref.data[r][fc]
        basis.append(vec)
    return basis


def inverse(m: MatrixS) -> MatrixS:
    if m.nrows != m.ncols:
        raise DimensionMismatch("inverse of non-square matrix")
    n = m.nrows
    table = m.table
    aug = MatrixS(table, [list(m.data[i]) + list(MatrixS.identity(table, n).data[i])
                          for i in range(n)])
    rref, pivots, _, _ = rowreduce(aug)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is singular")
    return MatrixS(table, [row[n:] for row in rref.data])


def solve(m: MatrixS, rhs: list) -> Optional[list]:
    """One solution of m x = rhs, or None when inconsistent (free vars -> 0)."""
    table = m.table
    aug = MatrixS(table, [list(row) + [b] for row, b in zip(m.data, rhs)])
    rref, pivots, _, _ = rowreduce(aug)
    if m.ncols in pivots:
        return None
    zero = Scalar.zero(table)
    x = [zero] * m.ncols
    for r, pc in enumerate(pivots):
        x[pc] = rref.data[r][m.ncols]
    return x


def bareiss(m: MatrixS, task: str, rhs: Optional[list] = None):
    """Dispatch exact elimination tasks: det | inverse | rank | nullspace | rowreduce."""
    if task == "det":
        return det_bareiss(m)
    if task == "inverse":
        return inverse(m)
    if task == "rank":
        return rank(m)
    if task == "nullspace":
        return nullspace(m)
    if task == "rowreduce":
        return rowreduce(m)[0]
    if task == "solve":
        return solve(m, rhs)
    raise ValueError(f"unknown task {task!r}")


# ---------------------------------------------------------------------------
# sparse structures
# ---------------------------------------------------------------------------


class SparseMat:
    """Sparse matrix as dict-of-row-dicts; entries are Scalars or Fractions."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Optional[dict] = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = {}
        if rows:
            for i, row in rows.items():
                clean = {j: v for j, v in row.items() if v}
                if clean:
                    self.rows[i] = clean

    @staticmethod
    def identity(n: int, one) -> "SparseMat":
        return SparseMat(n, n, {i: {i: one} for i in range(n)})

    @staticmethod
    def from_dense(m: MatrixS) -> "SparseMat":
        rows = {}
        for i, row in enumerate(m.data):
            r = {j: v for j, v in enumerate(row) if v}
            if r:
                rows[i] = r
        return SparseMat(m.nrows, m.ncols, rows)

    def to_dense(self, table: SymbolTable) -> MatrixS:
        m = MatrixS.zeros(table, self.nrows, self.ncols)
        for i, row in self.rows.items():
            for j, v in row.items():
                m.data[i][j] = v
        return m

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def __mul__(self, other: "SparseMat") -> "SparseMat":
        if self.ncols != other.nrows:
            raise DimensionMismatch("sparse matmul shape mismatch")
        out: dict = {}
        for i, row in self.rows.items():
            acc: dict = {}
            for k, a in row.items():
                brow = other.rows.get(k)
                if not brow:
                    continue
                for j, b in brow.items():
                    prev = acc.get(j)
                    val = a * b if prev is None else prev + a * b
                    if val:
                        acc[j] = val
                    elif prev is not None:
                        del acc[j]
            if acc:
                out[i] = acc
        return SparseMat(self.nrows, other.ncols, out)

    def __add__(self, other: "SparseMat") -> "SparseMat":
        out = {i: dict(r) for i, r in self.rows.items()}
        for i, row in other.rows.items():
            tgt = out.setdefault(i, {})
            for j, v in row.items():
                s = tgt.get(j)
                val = v if s is None else s + v
                if val:
                    tgt[j] = val
                elif s is not None:
                    del tgt[j]
            if not tgt:
                del out[i]
        return SparseMat(self.nrows, self.ncols, out)

    def __sub__(self, other: "SparseMat") -> "SparseMat":
        return self + other.scale(-1)

    def scale(self, c) -> "SparseMat":
        if not c:
            return SparseMat(self.nrows, self.ncols, {})
        return SparseMat(self.nrows, self.ncols,
                         {i: {j: v * c for j, v in r.items()} for i, r in self.rows.items()})

    def transpose(self) -> "SparseMat":
        out: dict = {}
        for i, row in self.rows.items():
            for j, v in row.items():
                out.setdefault(j, {})[i] = v
        return SparseMat(self.ncols, self.nrows, out)

    def kron(self, other: "SparseMat") -> "SparseMat":
        out: dict = {}
        for i, arow in self.rows.items():
            for k, brow in other.rows.items():
                orow = {}
                for j, a in arow.items():
                    for l, b in brow.items():
                        v = a * b
                        if v:
                            orow[j * other.ncols + l] = v
                if orow:
                    out[i * other.nrows + k] = orow
        return SparseMat(self.nrows * other.nrows, self.ncols * other.ncols, out)

    def apply(self, vec: dict) -> dict:
        """Matrix-vector product on a sparse column vector {index: value}."""
        out: dict = {}
        for i, row in self.rows.items():
            acc = None
            for j, a in row.items():
                v = vec.get(j)
                if v is not None and v:
                    term = a * v
                    acc = term if acc is None else acc + term
            if acc is not None and acc:
                out[i] = acc
        return out

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other) -> bool:
        return (isinstance(other, SparseMat) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.rows == other.rows)


class RowSpace:
    """Incrementally maintained reduced row echelon basis of a row span.

    Stored rows have pivot value 1 and are mutually fully reduced, so the
    basis is the unique RREF basis of the span: reductions and residuals do
    not depend on insertion order.  Optionally tracks, for every basis row,
    its expression in the originally inserted vectors (certificates).
    """

    __slots__ = ("pivots", "certs", "track", "ninserted", "_col_usage")

    def __init__(self, track_certificates: bool = False):
        self.pivots: dict = {}
        self.certs: dict = {}
        self.track = track_certificates
        self.ninserted = 0
        self._col_usage: dict = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict) -> dict:
        residual = {j: v for j, v in row.items() if v}
        return self._reduce_inplace(residual, None)

    def reduce_with_certificate(self, row: dict) -> tuple[dict, dict]:
        residual = {j: v for j, v in row.items() if v}
        cert: dict = {}
        self._reduce_inplace(residual, cert)
        return residual, cert

    def _reduce_inplace(self, row: dict, cert: Optional[dict]) -> dict:
        while True:
            hits = row.keys() & self.pivots.keys()
            if not hits:
                return row
            c = min(hits)
            coef = row.pop(c)
            pivot_row = self.pivots[c]
            for j, v in pivot_row.items():
                if j == c:
                    continue
                s = row.get(j)
                val = -coef * v if s is None else s - coef * v
                if val:
                    row[j] = val
                elif s is not None:
                    del row[j]
            if cert is not None:
                for k, v in self.certs[c].items():
                    s = cert.get(k)
                    val = coef * v if s is None else s + coef * v
                    if val:
                        cert[k] = val
                    elif s is not None:
                        del cert[k]
        # unreachable

    def add(self, row: dict) -> bool:
        """Insert a vector; True when it enlarged the span."""
        index = self.ninserted
        self.ninserted += 1
        residual = {j: v for j, v in row.items() if v}
        cert: Optional[dict] = {} if self.track else None
        self._reduce_inplace(residual, cert)
        if not residual:
            return False
        c = min(residual)
        inv_piv = None
        piv = residual[c]
        if piv != 1:
            if isinstance(piv, Fraction):
                inv_piv = 1 / piv
            else:
                inv_piv = piv.inv()
            residual = {j: inv_piv * v for j, v in residual.items()}
        if self.track:
            newcert = {k: -v for k, v in cert.items()}
            newcert[index] = 1
            if piv != 1:
                newcert = {k: inv_piv * v for k, v in newcert.items()}
            self.certs[c] = newcert
        # full back-substitution keeps the basis in RREF
        for pc in list(self._col_usage.get(c, ())):
            prow = self.pivots.get(pc)
            if prow is None or c not in prow:
                continue
            f = prow.pop(c)
            self._col_usage[c].discard(pc)
            for j, v in residual.items():
                if j == c:
                    continue
                s = prow.get(j)
                val = -f * v if s is None else s - f * v
                if val:
                    if s is None:
                        self._col_usage.setdefault(j, set()).add(pc)
                    prow[j] = val
                elif s is not None:
                    del prow[j]
                    self._col_usage.get(j, set()).discard(pc)
            if self.track:
                pcert = self.certs[pc]
                rcert = self.certs[c]
                for k, v in rcert.items():
                    s = pcert.get(k)
                    val = -f * v if s is None else s - f * v
                    if val:
                        pcert[k] = val
                    elif s is not None:
                        del pcert[k]
        self.pivots[c] = residual
        for j in residual:
            if j != c:
                self._col_usage.setdefault(j, set()).add(c)
        return True

    def contains(self, row: dict) -> bool:
        return not self.reduce(row)


def subspace_membership(v: Sequence[Scalar], span: Sequence[Sequence[Scalar]]):
    """Decide v in span(vectors); (True, coords) or (False, canonical residual).

    Coordinates are reported in the order the spanning vectors were given and
    reconstruct v exactly.
    """
    if any(len(w) != len(v) for w in span):
        raise DimensionMismatch("vector lengths differ")
    space = RowSpace(track_certificates=True)
    for w in span:
        space.add({j: x for j, x in enumerate(w) if x})
    residual, cert = space.reduce_with_certificate({j: x for j, x in enumerate(v) if x})
    if residual:
        return False, residual
    return True, cert

"""Hecke symmetries: construction, validation, quantum traces, bi-rank.

A Hecke symmetry is an invertible operator R on V (x) V satisfying the braid
form of the Yang-Baxter equation R12 R23 R12 = R23 R12 R23 together with the
quadratic relation (qI - R)(q^-1 I + R) = 0.  Construction always validates:
both residuals must vanish exactly, and the skew inverse Psi (the solution of
Tr_2 R12 Psi23 = sigma13) must exist.  The partial traces B = Tr_1 Psi and
C = Tr_2 Psi of the skew inverse define the quantum trace Tr_R M = Tr(M C).

Matrix convention: entries are stored operator-style, ``mat[out][in]``, and
R(e_i (x) e_j) = sum_kl R[(k,l)][(i,j)] e_k (x) e_l with multi-indices encoded
big-endian.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    BadDeformationParameter,
    DimensionMismatch,
    InconclusiveDepth,
    NotHecke,
    NotSkewInvertible,
    NotYangBaxter,
    ParseError,
)
from .linalg import MatrixS, RowSpace, TensorOp, embed_at, flip_op, partial_trace
from .scalar import EMPTY_TABLE, Scalar, SymbolTable, parse_scalar, qnumber


@dataclass
class HeckeSymmetry:
    """A validated Hecke symmetry with its skew-inverse data."""

    name: str
    N: int
    table: SymbolTable
    q: Scalar
    R: TensorOp
    psi: TensorOp
    b_op: MatrixS
    c_op: MatrixS
    parities: Optional[tuple] = None  # Z_2 grading of basis vectors, when meaningful

    @property
    def r_inv(self) -> TensorOp:
        # Hecke relation gives R^-1 = R - (q - 1/q) I
        xi = self.q - self.q.inv()
        ident = MatrixS.identity(self.table, self.N * self.N)
        return TensorOp(self.N, 2, self.R.mat - ident.scale(xi))

    def lift(self, table: SymbolTable) -> "HeckeSymmetry":
        """Same symmetry with scalars re-expressed over a larger symbol table."""
        if table == self.table:
            return self

        def lift_mat(m: MatrixS) -> MatrixS:
            return MatrixS(table, [[a.lift(table) for a in row] for row in m.data])

        return HeckeSymmetry(
            name=self.name,
            N=self.N,
            table=table,
            q=self.q.lift(table),
            R=TensorOp(self.N, 2, lift_mat(self.R.mat)),
            psi=TensorOp(self.N, 2, lift_mat(self.psi.mat)),
            b_op=lift_mat(self.b_op),
            c_op=lift_mat(self.c_op),
            parities=self.parities,
        )


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def yang_baxter_residual(R: TensorOp) -> TensorOp:
    r12 = embed_at(R, 1, 3)
    r23 = embed_at(R, 2, 3)
    return r12 * r23 * r12 - r23 * r12 * r23


def hecke_residual(R: TensorOp, q: Scalar) -> MatrixS:
    n2 = R.N * R.N
    ident = MatrixS.identity(R.table, n2)
    return (ident.scale(q) - R.mat) * (ident.scale(q.inv()) + R.mat)


def solve_skew_inverse(R: TensorOp) -> TensorOp:
    """Solve Tr_2 R12 Psi23 = sigma13 for Psi: a square N^4 linear system."""
    N = R.N
    table = R.table
    one = Scalar.one(table)

    def enc2(a, b):
        return a * N + b

    # unknown index for Psi[(m,o3)][(t,i3)]
    def unk(m, o3, t, i3):
        return ((m * N + o3) * N + t) * N + i3

    naug = N ** 4
    rdata = R.mat.data
    space = RowSpace()
    rows = []
    for o1 in range(N):
        for o3 in range(N):
            for i1 in range(N):
                for i3 in range(N):
                    row: dict = {}
                    for t in range(N):
                        r_row = rdata[enc2(o1, t)]
                        for m in range(N):
                            coef = r_row[enc2(i1, m)]
                            if coef:
                                u = unk(m, o3, t, i3)
                                s = row.get(u)
                                val = coef if s is None else s + coef
                                if val:
                                    row[u] = val
                                elif s is not None:
                                    del row[u]
                    rhs = one if (o1 == i3 and o3 == i1) else None
                    if rhs is not None:
                        row[naug] = -rhs
                    rows.append(row)
    for row in rows:
        space.add(row)
    if naug in space.pivots:
        raise NotSkewInvertible("skew-inverse system is inconsistent")
    if len(space.pivots) < naug:
        raise NotSkewInvertible("skew-inverse system is singular")
    zero = Scalar.zero(table)
    psi = MatrixS.zeros(table, N * N, N * N)
    for c, prow in space.pivots.items():
        value = prow.get(naug)
        x = -value if value is not None else zero
        m, rem = divmod(c, N ** 3)
        o3, rem = divmod(rem, N ** 2)
        t, i3 = divmod(rem, N)
        psi.data[enc2(m, o3)][enc2(t, i3)] = x
    return TensorOp(N, 2, psi)


def validate(name: str, N: int, table: SymbolTable, q: Scalar, R: TensorOp,
             parities: Optional[tuple] = None) -> HeckeSymmetry:
    if not yang_baxter_residual(R).is_zero():
        raise NotYangBaxter(f"{name}: Yang-Baxter residual is nonzero")
    if not hecke_residual(R, q).is_zero():
        raise NotHecke(f"{name}: Hecke residual is nonzero")
    psi = solve_skew_inverse(R)
    # independent check through the tensor-op route
    r12 = embed_at(R, 1, 3)
    psi23 = embed_at(psi, 2, 3)
    traced = partial_trace(r12 * psi23, 2)
    sigma13 = flip_op(table, N)
    if not (traced.mat - sigma13.mat).is_zero():
        raise NotSkewInvertible(f"{name}: skew-inverse residual is nonzero")
    b_op = partial_trace(psi, 1).mat
    c_op = partial_trace(psi, 2).mat
    return HeckeSymmetry(name=name, N=N, table=table, q=q, R=R,
                         psi=psi, b_op=b_op, c_op=c_op, parities=parities)


def validation_report(hs: HeckeSymmetry) -> dict:
    """Exact residual statuses for an already built symmetry."""
    r12 = embed_at(hs.R, 1, 3)
    psi23 = embed_at(hs.psi, 2, 3)
    skew = partial_trace(r12 * psi23, 2).mat - flip_op(hs.table, hs.N).mat
    return {
        "yang_baxter": yang_baxter_residual(hs.R).is_zero(),
        "hecke": hecke_residual(hs.R, hs.q).is_zero(),
        "skew_inverse": skew.is_zero(),
    }


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def build_flip(N: int, table: SymbolTable = EMPTY_TABLE) -> HeckeSymmetry:
    """The plain flip; involutive (q = 1)."""
    return validate(f"flip({N})", N, table, Scalar.one(table), flip_op(table, N),
                    parities=tuple([0] * N))


def build_superflip(m: int, n: int, table: SymbolTable = EMPTY_TABLE) -> HeckeSymmetry:
    """Graded flip on a super space with m even and n odd directions (q = 1)."""
    N = m + n
    parities = tuple([0] * m + [1] * n)
    mat = MatrixS.zeros(table, N * N, N * N)
    for i in range(N):
        for j in range(N):
            sign = -1 if parities[i] and parities[j] else 1
            mat.data[j * N + i][i * N + j] = Scalar.from_fraction(table, sign)
    return validate(f"superflip({m},{n})", N, table, Scalar.one(table),
                    TensorOp(N, 2, mat), parities=parities)


def build_dj_gl(N: int, q: Scalar) -> HeckeSymmetry:
    """Drinfeld-Jimbo GL(N) braiding (flip composed with the quasitriangular matrix).

    R(e_i (x) e_j) = q e_i (x) e_i          if i = j,
                     e_j (x) e_i + xi e_i (x) e_j   if i < j   (xi = q - 1/q),
                     e_j (x) e_i            if i > j.
    """
    table = q.table
    if q.is_zero():
        raise BadDeformationParameter("q must be nonzero")
    xi = q - q.inv()
    mat = MatrixS.zeros(table, N * N, N * N)
    for i in range(N):
        for j in range(N):
            col = i * N + j
            if i == j:
                mat.data[col][col] = q
            else:
                mat.data[j * N + i][col] = Scalar.one(table)
                if i < j:
                    mat.data[col][col] = xi
    return validate(f"dj_gl({N})", N, table, q, TensorOp(N, 2, mat),
                    parities=tuple([0] * N))


def build_q_super(m: int, n: int, q: Scalar) -> HeckeSymmetry:
    """Standard q-deformation of the super-flip of super-dimension (m|n)."""
    table = q.table
    if q.is_zero():
        raise BadDeformationParameter("q must be nonzero")
    N = m + n
    parities = tuple([0] * m + [1] * n)
    xi = q - q.inv()
    mat = MatrixS.zeros(table, N * N, N * N)
    for i in range(N):
        for j in range(N):
            col = i * N + j
            if i == j:
                mat.data[col][col] = q if parities[i] == 0 else -q.inv()
            else:
                sign = -1 if parities[i] and parities[j] else 1
                mat.data[j * N + i][col] = Scalar.from_fraction(table, sign)
                if i < j:
                    mat.data[col][col] = xi
    return validate(f"q_super({m},{n})", N, table, q, TensorOp(N, 2, mat),
                    parities=parities)


def build_from_file(path: str) -> HeckeSymmetry:
    """Load an R-matrix from a JSON document.

    Fields: ``dim``; optional ``symbols`` (names for the scalar grammar);
    optional ``q`` (scalar string, default "1"); ``entries``, a list of
    ``{"out_pair": [k, l], "in_pair": [i, j], "value": "<scalar>"}`` with
    1-based indices and the convention R(e_i (x) e_j) = sum R^kl_ij e_k (x) e_l.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read R-matrix file {path!r}: {exc}") from exc
    try:
        N = int(doc["dim"])
        symbols = doc.get("symbols", [])
        table = SymbolTable(symbols)
        q = parse_scalar(str(doc.get("q", "1")), table)
        mat = MatrixS.zeros(table, N * N, N * N)
        for entry in doc["entries"]:
            k, l = entry["out_pair"]
            i, j = entry["in_pair"]
            for idx in (k, l, i, j):
                if not 1 <= idx <= N:
                    raise ParseError(f"index {idx} out of range 1..{N}")
            value = parse_scalar(str(entry["value"]), table)
            mat.data[(k - 1) * N + (l - 1)][(i - 1) * N + (j - 1)] = value
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed R-matrix file {path!r}: {exc}") from exc
    return validate(f"file({path})", N, table, q, TensorOp(N, 2, mat))


def build_builtin(kind: str, *, N: int = 0, m: int = 0, n: int = 0,
                  q: Optional[Scalar] = None,
                  table: Optional[SymbolTable] = None) -> HeckeSymmetry:
    if kind == "flip":
        return build_flip(N, table or EMPTY_TABLE)
    if kind == "superflip":
        return build_superflip(m, n, table or EMPTY_TABLE)
    if kind == "dj_gl":
        if q is None:
            raise ParseError("dj_gl requires q")
        return build_dj_gl(N, q)
    if kind == "q_super":
        if q is None:
            raise ParseError("q_super requires q")
        return build_q_super(m, n, q)
    raise ParseError(f"unknown builtin {kind!r}")


# ---------------------------------------------------------------------------
# quantum traces
# ---------------------------------------------------------------------------


def rtrace(M, hs: HeckeSymmetry):
    """Tr_R M = Tr(M C); entries may live in any algebra with Scalar action."""
    data = M.data if isinstance(M, MatrixS) else M
    N = hs.N
    if len(data) != N:
        raise DimensionMismatch("matrix size does not match the symmetry")
    c = hs.c_op.data
    total = None
    for i in range(N):
        for j in range(N):
            cv = c[j][i]
            if not cv:
                continue
            term = data[i][j] * cv
            total = term if total is None else total + term
    if total is None:
        total = Scalar.zero(hs.table)
    return total


def multitrace(op: TensorOp, hs: HeckeSymmetry) -> Scalar:
    """Tr_R(1..k) of an operator on V^(tensor k): Tr(op . C^(x k))."""
    ckron = hs.c_op
    for _ in range(op.arity - 1):
        ckron = ckron.kron(hs.c_op)
    total = Scalar.zero(hs.table)
    for a, row in enumerate(op.mat.data):
        for b, v in enumerate(row):
            if v:
                cv = ckron.data[b][a]
                if cv:
                    total = total + v * cv
    return total


# ---------------------------------------------------------------------------
# bi-rank from the Hilbert-Poincare series
# ---------------------------------------------------------------------------


@dataclass
class BiRankReport:
    minus_series: list       # dim of k-th antisymmetric component, k = 0..depth
    plus_series: list        # dim of k-th symmetric component
    numerator: list          # coefficients of the reconstructed P_-(t) numerator
    denominator: list        # coefficients of its denominator (constant term 1)
    m: int
    n: int
    depth: int
    kq_checked: list = field(default_factory=list)  # q-integers required nonzero


def _image_basis(mat: MatrixS) -> list:
    """Independent columns of `mat` as sparse dicts (basis of the image)."""
    cols = []
    space = RowSpace()
    n = mat.ncols
    for c in range(n):
        vec = {r: mat.data[r][c] for r in range(mat.nrows) if mat.data[r][c]}
        if space.add(vec):
            cols.append(vec)
    return cols


def _component_dims(hs: HeckeSymmetry, projector_mat: MatrixS, depth: int,
                    numeric: bool) -> list:
    """dim of T(V)/<Im projector> components for k = 0..depth."""
    N = hs.N
    image = _image_basis(projector_mat)
    if numeric:
        image = [{k: v.as_fraction() for k, v in vec.items()} for vec in image]
    dims = [1, N]
    for k in range(2, depth + 1):
        space = RowSpace()
        size = N ** k
        for pos in range(k - 1):
            right = N ** (k - 2 - pos)
            left = N ** pos
            for vec in image:
                for wl in range(left):
                    base_l = wl * (N * N)
                    for wr in range(right):
                        row = {(base_l + pair) * right + wr: v for pair, v in vec.items()}
                        space.add(row)
        dims.append(size - space.rank)
    return dims


def _fit_rational(series: Sequence[int], depth: int):
    """Minimal-total-degree rational function fitting the series coefficients.

    Returns (numerator coeffs, denominator coeffs) or None; the denominator
    has constant term 1.  Scanning total degree then denominator degree
    ascending makes the first hit the coprime minimal representation.
    """
    coeffs = [Fraction(c) for c in series[: depth + 1]]
    for total in range(0, depth):
        for nden in range(0, total + 1):
            nnum = total - nden
            # unknown d_1..d_nden; equations sum_j d_j c_{k-j} = -c_k, k > nnum
            rows = []
            rhs = []
            for k in range(nnum + 1, depth + 1):
                rows.append([coeffs[k - j] if 0 <= k - j <= depth else Fraction(0)
                             for j in range(1, nden + 1)])
                rhs.append(-coeffs[k])
            sol = _solve_fraction_system(rows, rhs, nden)
            if sol is None:
                continue
            den = [Fraction(1)] + sol
            num = []
            for k in range(0, nnum + 1):
                num.append(sum(den[j] * coeffs[k - j] for j in range(min(k, nden) + 1)))
            while num and not num[-1]:
                num.pop()
            if len(num) - 1 < 0:
                num = [Fraction(0)]
            return num, den
    return None


def _solve_fraction_system(rows, rhs, nvars):
    if nvars == 0:
        return [] if all(not b for b in rhs) else None
    space = RowSpace()
    aug = nvars
    for row, b in zip(rows, rhs):
        vec = {j: v for j, v in enumerate(row) if v}
        if b:
            vec[aug] = -b
        space.add(vec)
    if aug in space.pivots:
        return None
    # free variables (if any) are set to zero
    sol = [Fraction(0)] * nvars
    for c, prow in space.pivots.items():
        sol[c] = -prow.get(aug, Fraction(0))
    return sol


def birank(hs: HeckeSymmetry, depth: int) -> BiRankReport:
    """Bi-rank (m|n) read off the rational form of the Poincare series P_-."""
    if depth < 2:
        raise InconclusiveDepth("depth must be at least 2")
    kq_checked = []
    qv = hs.q.const_or_none()
    if qv is not None:
        for k in range(1, depth + 1):
            if qnumber(k, hs.q).is_zero():
                raise BadDeformationParameter(f"{k}_q vanishes at q = {qv}")
            kq_checked.append(k)
    numeric = not hs.table.names or all(
        a.is_constant() for row in hs.R.mat.data for a in row)
    ident = MatrixS.identity(hs.table, hs.N * hs.N)
    anti_proj = ident.scale(hs.q.inv()) + hs.R.mat      # its image is quotiented for Lambda
    sym_proj = ident.scale(hs.q) - hs.R.mat             # its image is quotiented for Sym
    minus = _component_dims(hs, anti_proj, depth, numeric)
    plus = _component_dims(hs, sym_proj, depth, numeric)
    fit = _fit_rational(minus, depth)
    fit_prev = _fit_rational(minus, depth - 1)
    if fit is None or fit_prev is None or fit != fit_prev:
        raise InconclusiveDepth(
            f"series reconstruction not stable at depth {depth}: {minus}")
    num, den = fit
    return BiRankReport(minus_series=minus, plus_series=plus,
                        numerator=num, denominator=den,
                        m=len(num) - 1, n=len(den) - 1, depth=depth,
                        kq_checked=kq_checked)

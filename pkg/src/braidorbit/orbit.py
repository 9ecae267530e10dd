"""Braided orbits: regularity, Hankel data, and cotangent idempotents.

An orbit is the quotient of the reflection equation algebra fixing the first
m+n quantum power sums at their parametrized values.  The gradient matrix of
those power sums and its pairing row matrix multiply to a Hankel matrix of
power-sum values; when that matrix is invertible (the regularity condition on
the eigenvalues) the element A (BA)^-1 B is an idempotent over the quotient
and its complement realizes the 1-form module.

Idempotency is certified two ways: structurally (the free-algebra Hankel
identity plus the Cayley-Hamilton recurrence for the higher power sums) and,
within the degree cap, by entrywise reduction of ebar^2 - ebar against the
orbit ideal.  The modified-algebra variant shifts the generators (q != 1) or
straightens in the enveloping algebra (q = 1).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    DegenerateProfile,
    ExceptionalProfile,
    IdentityFailed,
    PoleAtPoint,
    RecurrenceMismatch,
    ResourceLimit,
    ShiftUnavailable,
)
from .hecke import HeckeSymmetry
from .linalg import MatrixS, RowSpace, det_bareiss, inverse
from .rea import (
    NCPoly,
    PBWRules,
    RelationSpace,
    WordIndexer,
    generating_matrix,
    l_matrix_power,
    nc_matmul,
    power_sum_element,
    relation_space,
    shift_generators,
)
from .scalar import Scalar, SymbolTable
from .symfun import (
    EigenvalueProfile,
    ch_coefficients,
    eval_symexpr,
    power_sum_param,
    quantum_dims,
)


# ---------------------------------------------------------------------------
# regularity
# ---------------------------------------------------------------------------


@dataclass
class RegularityVerdict:
    regular: bool
    violated: list                      # (kind, i, j) with 1-based indices
    det_hankel: Optional[Scalar] = None

    def __bool__(self) -> bool:
        return self.regular


def regularity(profile: EigenvalueProfile, with_det: bool = False) -> RegularityVerdict:
    """Exceptional-set membership test on the eigenvalue profile.

    Plain mode checks mu_i != q^2 mu_j, nu_i != q^2 nu_j, mu_i != q^2 nu_j
    over the relevant index pairs; the shifted mode adds the central term
    (-q^-1 h on the q^-2 side, +q h on the q^2 side).  Pairwise-distinct
    eigenvalues are additionally required because the quantum dimensions
    have poles at coincident values.
    """
    q, h = profile.q, profile.h
    mus, nus = profile.mus, profile.nus
    violated = []

    def check(kind, i, j, expr):
        if expr.is_zero():
            violated.append((kind, i + 1, j + 1))

    if not profile.is_mrea:
        q2 = q ** 2
        for i, a in enumerate(mus):
            for j, b in enumerate(mus):
                if i != j:
                    check("even-even", i, j, a - q2 * b)
        for i, a in enumerate(nus):
            for j, b in enumerate(nus):
                if i != j:
                    check("odd-odd", i, j, a - q2 * b)
        for i, a in enumerate(mus):
            for j, b in enumerate(nus):
                check("even-odd", i, j, a - q2 * b)
    else:
        qi2 = q.inv() ** 2
        q2 = q ** 2
        sm = q.inv() * h
        sp = q * h
        for i, a in enumerate(mus):
            for j, b in enumerate(mus):
                if i != j:
                    check("even-even", i, j, a - qi2 * b - sm)
        for i, a in enumerate(nus):
            for j, b in enumerate(nus):
                if i != j:
                    check("odd-odd", i, j, a - q2 * b + sp)
        for i, a in enumerate(mus):
            for j, b in enumerate(nus):
                check("even-odd", i, j, a - q2 * b + sp)
    # coincident eigenvalues are poles of the quantum dimensions, hence
    # excluded on top of the determinant condition
    for i in range(len(mus)):
        for j in range(i + 1, len(mus)):
            check("even-coincident", i, j, mus[i] - mus[j])
    for i in range(len(nus)):
        for j in range(i + 1, len(nus)):
            check("odd-coincident", i, j, nus[i] - nus[j])
    for i, a in enumerate(mus):
        for j, b in enumerate(nus):
            check("mixed-coincident", i, j, a - b)
    det = None
    if with_det and not violated:
        det = det_bareiss(hankel(profile))
    return RegularityVerdict(regular=not violated, violated=violated, det_hankel=det)


# ---------------------------------------------------------------------------
# Hankel matrix of parametrized power sums
# ---------------------------------------------------------------------------


def hankel(profile: EigenvalueProfile) -> MatrixS:
    """(m+n) x (m+n) matrix with entry (k,l) = p_{k+l-2}; top-left is p_0."""
    size = profile.m + profile.n
    rows = [[power_sum_param(k + l, profile) for l in range(size)] for k in range(size)]
    return MatrixS(profile.table, rows)


def hankel_det_target(profile: EigenvalueProfile) -> Scalar:
    """prod d_i prod d'_j (prod_{i<j}(mu_i-mu_j) prod(mu_i-nu_j) prod_{i<j}(nu_i-nu_j))^2."""
    dims = quantum_dims(profile)
    table = profile.table
    acc = Scalar.one(table)
    for d in dims.d + dims.dprime:
        acc = acc * d
    van = Scalar.one(table)
    mus, nus = profile.mus, profile.nus
    for i in range(len(mus)):
        for j in range(i + 1, len(mus)):
            van = van * (mus[i] - mus[j])
    for a in mus:
        for b in nus:
            van = van * (a - b)
    for i in range(len(nus)):
        for j in range(i + 1, len(nus)):
            van = van * (nus[i] - nus[j])
    return acc * van * van


def hankel_det_check(m: int, n: int, strategy: str = "symbolic",
                     seed: int = 0, trials: int = 7) -> bool:
    """Verify det(Hankel) equals its factorized closed form for bi-rank (m|n).

    symbolic: exact identity over the fully symbolic profile.
    sampled: exact evaluation at `trials` pseudo-random rational points drawn
    from the same deterministic generator as the scalar identity tester.
    """
    if strategy == "symbolic":
        prof = _symbolic_profile(m, n)
        det = det_bareiss(hankel(prof))
        target = hankel_det_target(prof)
        if det != target:
            raise IdentityFailed(f"Hankel determinant mismatch for ({m}|{n})")
        return True
    if strategy == "sampled":
        rng = random.Random(seed)
        span = 2 ** 31
        done = 0
        attempts = 0
        while done < trials:
            attempts += 1
            if attempts > 10 * trials + 20:
                raise ResourceLimit("too many degenerate redraws in sampled check")
            binding = {"q": Fraction(rng.randint(1, span), rng.randint(1, span))}
            for i in range(1, m + 1):
                binding[f"mu{i}"] = Fraction(rng.randint(1, span), rng.randint(1, span))
            for j in range(1, n + 1):
                binding[f"nu{j}"] = Fraction(rng.randint(1, span), rng.randint(1, span))
            table = SymbolTable(())
            try:
                prof = EigenvalueProfile(
                    [Scalar.from_fraction(table, binding[f"mu{i}"]) for i in range(1, m + 1)],
                    [Scalar.from_fraction(table, binding[f"nu{j}"]) for j in range(1, n + 1)],
                    Scalar.from_fraction(table, binding["q"]))
                det = det_bareiss(hankel(prof))
                target = hankel_det_target(prof)
            except (DegenerateProfile, PoleAtPoint):
                continue
            if det != target:
                raise IdentityFailed(f"Hankel determinant fails at {binding}")
            done += 1
        return True
    raise ValueError(f"unknown strategy {strategy!r}")


def _symbolic_profile(m: int, n: int) -> EigenvalueProfile:
    table = SymbolTable.for_profile(m, n)
    q = Scalar.from_symbol(table, "q")
    mus = [Scalar.from_symbol(table, f"mu{i}") for i in range(1, m + 1)]
    nus = [Scalar.from_symbol(table, f"nu{j}") for j in range(1, n + 1)]
    return EigenvalueProfile(mus, nus, q)


# ---------------------------------------------------------------------------
# gradient matrices
# ---------------------------------------------------------------------------


def gradient_matrices(hs: HeckeSymmetry, size: int) -> tuple:
    """(A, B): gradient columns of the power sums and their pairing rows.

    Position (i, j) of the flattened matrix index is j*N + i; column k of A
    holds (L^(k-1) C)[j][i], row k of B holds (L^(k-1))[i][j], so that
    (B A)_{kl} = Tr_R L^(k+l-2) holds word by word in the free algebra.
    """
    N = hs.N
    table = hs.table
    powers = [None]  # L^0 handled separately
    L = generating_matrix(N, table)
    acc = None
    for k in range(1, size):
        acc = L if acc is None else nc_matmul(acc, L)
        powers.append(acc)
    c = hs.c_op.data
    a_cols = []
    b_rows = []
    for k in range(1, size + 1):
        acol = [None] * (N * N)
        brow = [None] * (N * N)
        for i in range(N):
            for j in range(N):
                pos = j * N + i
                if k == 1:
                    acol[pos] = NCPoly.const(N, table, c[j][i])
                    brow[pos] = (NCPoly.one(N, table) if i == j
                                 else NCPoly.zero(N, table))
                else:
                    lk = powers[k - 1]
                    # (L^(k-1) C)[j][i]
                    entry = NCPoly.zero(N, table)
                    for t in range(N):
                        cv = c[t][i]
                        if cv:
                            entry = entry + lk[j][t] * cv
                    acol[pos] = entry
                    brow[pos] = lk[i][j]
        a_cols.append(acol)
        b_rows.append(brow)
    A = [[a_cols[k][pos] for k in range(size)] for pos in range(N * N)]
    B = [[b_rows[k][pos] for pos in range(N * N)] for k in range(size)]
    return A, B


def free_hankel_identity(hs: HeckeSymmetry, size: int) -> bool:
    """(B A)_{kl} = Tr_R L^{k+l-2} as words in the free algebra."""
    A, B = gradient_matrices(hs, size)
    ba = nc_matmul(B, A)
    trc = NCPoly.const(hs.N, hs.table, hs.c_op.trace())
    for k in range(size):
        for l in range(size):
            expect = trc if k + l == 0 else power_sum_element(k + l, hs)
            if ba[k][l] != expect:
                return False
    return True


# ---------------------------------------------------------------------------
# higher power sums via the Cayley-Hamilton recurrence
# ---------------------------------------------------------------------------


def ch_values(profile: EigenvalueProfile) -> list:
    """Cayley-Hamilton coefficient values on an h = 0 profile (descending powers)."""
    return [eval_symexpr(c, profile)
            for c in ch_coefficients(profile.m, profile.n, profile.q)]


def hatted_ch_values(profile: EigenvalueProfile) -> list:
    """Shift-expanded coefficient values for the modified algebra.

    Unhat the eigenvalues (mu = muhat - h/xi), evaluate the plain
    coefficients there, then redistribute binomially so that the identity is
    grouped in powers of the shifted generating matrix.  Needs q != 1; the
    q = 1 limit is taken by the caller through a symbolic-q detour.
    """
    q, h = profile.q, profile.h
    xi = q - q.inv()
    if xi.is_zero():
        raise ShiftUnavailable("the shift expansion needs q != 1")
    s = h * xi.inv()
    base = EigenvalueProfile([mu - s for mu in profile.mus],
                             [nu - s for nu in profile.nus], q)
    plain = ch_values(base)
    size = profile.m + profile.n
    hatted = []
    for j in range(size + 1):
        acc = Scalar.zero(profile.table)
        for i in range(j + 1):
            acc = acc + plain[i] * math.comb(size - i, size - j) * ((-s) ** (j - i))
        hatted.append(acc)
    return hatted


def higher_power_reduction(profile: EigenvalueProfile, top: int,
                           coeff_values: Optional[list] = None) -> list:
    """p_k for k = m+n+1..top via the recurrence; checked against the
    parametrized values.  Returns the recurrence values."""
    size = profile.m + profile.n
    if coeff_values is None:
        if profile.is_mrea:
            coeff_values = hatted_ch_values(profile)
        else:
            coeff_values = ch_values(profile)
    lead = coeff_values[0]
    if lead.is_zero():
        raise ExceptionalProfile("leading Cayley-Hamilton coefficient vanishes")
    known = {k: power_sum_param(k, profile) for k in range(size + 1)}
    out = []
    for t in range(size + 1, top + 1):
        acc = Scalar.zero(profile.table)
        for i in range(1, size + 1):
            acc = acc + coeff_values[i] * known[t - i]
        val = -(acc / lead)
        expected = power_sum_param(t, profile)
        if val != expected:
            raise RecurrenceMismatch(
                f"recurrence p_{t} = {val} but parametrization gives {expected}")
        known[t] = val
        out.append(val)
    return out


# ---------------------------------------------------------------------------
# orbit ideal reduction
# ---------------------------------------------------------------------------


class OrbitIdealReducer:
    """Membership in the degree-truncated orbit ideal.

    Spanning vectors are word (x) generator (x) word products of the
    homogeneous quadratic relations and the inhomogeneous orbit generators,
    echelonized once; reduction against the unique echelon basis gives
    canonical residuals.
    """

    def __init__(self, rs: RelationSpace, extra_generators: Sequence[NCPoly],
                 max_degree: int):
        N = rs.hs.N
        table = rs.hs.table
        self.indexer = WordIndexer(N, max_degree)
        self.N = N
        self.table = table
        self.max_degree = max_degree
        space = RowSpace()
        base = N * N
        # homogeneous quadratic slice
        for d in range(2, max_degree + 1):
            for pos in range(d - 1):
                left = base ** pos
                right = base ** (d - 2 - pos)
                offset = self.indexer.offsets[d]
                for vec in rs.basis:
                    for wl in range(left):
                        for wr in range(right):
                            row = {offset + (wl * base * base + pair) * right + wr: cval
                                   for pair, cval in vec.items()}
                            space.add(row)
        # inhomogeneous generators framed by words
        for g in extra_generators:
            gdeg = g.max_degree()
            for total_pad in range(max_degree - gdeg + 1):
                for lpad in range(total_pad + 1):
                    rpad = total_pad - lpad
                    for wl in range(base ** lpad):
                        left_word = _decode(wl, lpad, base)
                        for wr in range(base ** rpad):
                            right_word = _decode(wr, rpad, base)
                            row = {}
                            for w, cval in g.terms.items():
                                word = left_word + w + right_word
                                row[self.indexer.index(word)] = cval
                            space.add(row)
        self.space = space

    def reduce(self, x: NCPoly) -> NCPoly:
        if x.max_degree() > self.max_degree:
            raise ResourceLimit(
                f"element degree {x.max_degree()} above reducer degree {self.max_degree}")
        res = self.space.reduce(self.indexer.vector(x))
        return self.indexer.unvector(res, self.N, self.table)


def _decode(code: int, length: int, base: int) -> tuple:
    out = []
    for _ in range(length):
        code, g = divmod(code, base)
        out.append(g)
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# cotangent pipeline
# ---------------------------------------------------------------------------


@dataclass
class OrbitQuotient:
    hs: HeckeSymmetry
    profile: EigenvalueProfile
    targets: list            # parametrized p_1..p_{m+n}
    mode: str                # "braided" | "nc" | "nc-classical"


@dataclass
class CotangentData:
    A: list                  # N^2 x (m+n) gradient matrix (NCPoly)
    Bmat: list               # (m+n) x N^2 pairing matrix (NCPoly)
    H: MatrixS               # Hankel matrix of parametrized power sums
    ebar: list               # N^2 x N^2 idempotent (NCPoly entries)
    e: list                  # complement I - ebar
    certificates: dict

    def summary(self) -> dict:
        return dict(self.certificates)


def _idempotent(hs: HeckeSymmetry, profile: EigenvalueProfile):
    size = profile.m + profile.n
    A, B = gradient_matrices(hs, size)
    H = hankel(profile)
    det = det_bareiss(H)
    if det.is_zero():
        raise ExceptionalProfile("Hankel matrix is singular on this profile")
    hinv = inverse(H)
    hinv_nc = [[NCPoly.const(hs.N, hs.table, v) for v in row] for row in hinv.data]
    ebar = nc_matmul(nc_matmul(A, hinv_nc), B)
    n2 = hs.N * hs.N
    e = [[(NCPoly.one(hs.N, hs.table) if r == c else NCPoly.zero(hs.N, hs.table)) - ebar[r][c]
          for c in range(n2)] for r in range(n2)]
    return A, B, H, ebar, e


def _idempotency_entries(ebar: list, hs: HeckeSymmetry) -> list:
    n2 = hs.N * hs.N
    sq = nc_matmul(ebar, ebar)
    return [sq[r][c] - ebar[r][c] for r in range(n2) for c in range(n2)]


def cotangent(hs: HeckeSymmetry, profile: EigenvalueProfile,
              verify_degree_cap: Optional[int] = None) -> CotangentData:
    """Build and certify the cotangent idempotent over a regular orbit."""
    verdict = regularity(profile)
    if not verdict.regular:
        raise ExceptionalProfile(f"profile is exceptional: {verdict.violated}")
    size = profile.m + profile.n
    certificates = {"regular": True}
    certificates["free_hankel"] = free_hankel_identity(hs, size)
    A, B, H, ebar, e = _idempotent(hs, profile)
    higher_power_reduction(profile, 2 * size - 2)
    certificates["power_recurrence"] = True
    rs = relation_space(hs, "minus")
    targets = [power_sum_param(k, profile) for k in range(1, size + 1)]
    gens = [power_sum_element(k, hs) - NCPoly.const(hs.N, hs.table, targets[k - 1])
            for k in range(1, size + 1)]
    entries = _idempotency_entries(ebar, hs)
    need = max((x.max_degree() for x in entries), default=0)
    cap = verify_degree_cap if verify_degree_cap is not None else need
    if need <= cap and (hs.N * hs.N) ** max(need, 2) <= 1_000_000:
        reducer = OrbitIdealReducer(rs, gens, max(need, 2))
        failures = []
        for idx, x in enumerate(entries):
            res = reducer.reduce(x)
            if not res.is_zero():
                failures.append((idx, res))
        if failures:
            raise IdentityFailed(
                f"idempotency residual nonzero in {len(failures)} entries: "
                f"first {failures[0]}")
        certificates["entrywise"] = True
        certificates["reduction_degree"] = max(need, 2)
    else:
        certificates["entrywise"] = False
        certificates["structural_only"] = True
    # complement: e^2 - e = ebar^2 - ebar identically, checked cheaply
    n2 = hs.N * hs.N
    esq = nc_matmul(e, e)
    ebarsq = nc_matmul(ebar, ebar)
    certificates["complement_idempotent"] = all(
        (esq[r][c] - e[r][c]) == (ebarsq[r][c] - ebar[r][c])
        for r in range(n2) for c in range(n2))
    return CotangentData(A=A, Bmat=B, H=H, ebar=ebar, e=e, certificates=certificates)


def nc_orbit(hs: HeckeSymmetry, profile: EigenvalueProfile,
             verify_degree_cap: Optional[int] = None) -> tuple:
    """Modified-algebra orbit: shifted power sums, coefficients and idempotent.

    For q != 1 the zero tests route through the shift substitution; at q = 1
    the symmetry must be a (super-)flip and straightening takes over.  The
    h = 0 case degenerates to the plain pipeline.
    """
    verdict = regularity(profile)
    if not verdict.regular:
        raise ExceptionalProfile(f"profile is exceptional: {verdict.violated}")
    size = profile.m + profile.n
    q = profile.q
    xi = q - q.inv()
    at_q1 = xi.is_zero()
    certificates = {"regular": True}
    certificates["free_hankel"] = free_hankel_identity(hs, size)
    A, B, H, ebar, e = _idempotent(hs, profile)
    if profile.is_mrea:
        if at_q1:
            coeffs = _hatted_ch_values_q1(profile)
            mode = "nc-classical"
        else:
            coeffs = hatted_ch_values(profile)
            mode = "nc"
    else:
        coeffs = ch_values(profile)
        mode = "braided"
    higher_power_reduction(profile, 2 * size - 2, coeff_values=coeffs)
    certificates["power_recurrence"] = True
    targets = [power_sum_param(k, profile) for k in range(1, size + 1)]
    gens = [power_sum_element(k, hs) - NCPoly.const(hs.N, hs.table, targets[k - 1])
            for k in range(1, size + 1)]
    entries = _idempotency_entries(ebar, hs)
    need = max((x.max_degree() for x in entries), default=0)
    cap = verify_degree_cap if verify_degree_cap is not None else need
    if need <= cap and (hs.N * hs.N) ** max(need, 2) <= 1_000_000:
        if profile.is_mrea and at_q1:
            _verify_entries_pbw(hs, profile, gens, entries)
        elif profile.is_mrea:
            _verify_entries_shift(hs, profile, gens, entries, max(need, 2))
        else:
            rs = relation_space(hs, "minus")
            reducer = OrbitIdealReducer(rs, gens, max(need, 2))
            for idx, x in enumerate(entries):
                if not reducer.reduce(x).is_zero():
                    raise IdentityFailed(f"idempotency residual in entry {idx}")
        certificates["entrywise"] = True
    else:
        certificates["entrywise"] = False
        certificates["structural_only"] = True
    quotient = OrbitQuotient(hs=hs, profile=profile, targets=targets, mode=mode)
    data = CotangentData(A=A, Bmat=B, H=H, ebar=ebar, e=e, certificates=certificates)
    return quotient, data


def _verify_entries_shift(hs, profile, gens, entries, degree):
    """Shift to the plain algebra and reduce there (q != 1)."""
    q = profile.q
    s = profile.h * (q - q.inv()).inv()
    rs = relation_space(hs, "minus")
    shifted_gens = [shift_generators(g, s) for g in gens]
    reducer = OrbitIdealReducer(rs, shifted_gens, degree)
    for idx, x in enumerate(entries):
        res = reducer.reduce(shift_generators(x, s))
        if not res.is_zero():
            raise IdentityFailed(f"idempotency residual (shift route) in entry {idx}")


def _verify_entries_pbw(hs, profile, gens, entries):
    """Straightening route at q = 1: reduce normal forms against normal forms."""
    parities = hs.parities
    if parities is None:
        raise ShiftUnavailable("q = 1 reduction needs a graded flip symmetry")
    m = sum(1 for p in parities if p == 0)
    n = len(parities) - m
    rules = PBWRules(m, n, profile.h)
    need = max(x.max_degree() for x in entries)
    base = hs.N * hs.N
    indexer = WordIndexer(hs.N, need)
    space = RowSpace()
    for g in gens:
        gdeg = g.max_degree()
        for total_pad in range(need - gdeg + 1):
            for lpad in range(total_pad + 1):
                rpad = total_pad - lpad
                for wl in range(base ** lpad):
                    lw = _decode(wl, lpad, base)
                    for wr in range(base ** rpad):
                        rw = _decode(wr, rpad, base)
                        framed = NCPoly(hs.N, hs.table, {lw + w + rw: c
                                                         for w, c in g.terms.items()})
                        nf = rules.reduce(framed)
                        if not nf.is_zero():
                            space.add(indexer.vector(nf))
    for idx, x in enumerate(entries):
        nf = rules.reduce(x)
        if space.reduce(indexer.vector(nf)):
            raise IdentityFailed(f"idempotency residual (straightening) in entry {idx}")


def _hatted_ch_values_q1(profile: EigenvalueProfile) -> list:
    """q -> 1 limit of the shifted coefficients through a symbolic-q detour.

    The individual shift terms have poles in q - 1/q; the collected
    coefficients do not, so substituting q = 1 after normalization is exact.
    """
    table = profile.table
    if "q" not in table:
        raise ShiftUnavailable("q = 1 detour needs a symbol 'q' in the table")
    qsym = Scalar.from_symbol(table, "q")
    sym_profile = EigenvalueProfile(profile.mus, profile.nus, qsym, profile.h)
    coeffs = hatted_ch_values(sym_profile)
    return [c.substitute({"q": 1}) for c in coeffs]

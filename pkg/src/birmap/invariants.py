"""Conserved-quantity verification and search by exact linear algebra.

A candidate invariant is a ratio of two bidegree-(d,d) coefficient grids in
(x_n, x_{n-1}), optionally taken to a power (2 for the squared non-QRT form).
Conservation means exact field equality of K at consecutive orbit pairs;
nothing here ever compares floats.

Search works per orbit: an orbit with invariant value c lies on the curve
num - c*den = 0, so the nullspace of monomial evaluations along one orbit
spans that single curve, and the spans of two different orbits add up to
span{num, den}.  Any ratio of two independent span elements is conserved
(a Moebius transform of the original invariant), and membership of a
reference grid in the span is plain rank arithmetic.

The squared-ratio detection uses the parity trick: when only K = (U/V)^2 is
conserved, U/V itself alternates in sign along the orbit, so same-parity
samples lie on a single bidegree-(2,2) curve that full sampling excludes.
The two pure-square directions inside the degree-(4,4) span are recovered
exactly from a quadratic in the half-span coordinates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .errors import AllSamplesSingular, RankDeficientSamples, SingularOrbit
from .mapping import Mapping

Grid = tuple[tuple[object, ...], ...]


@dataclass(frozen=True)
class InvariantCandidate:
    """num/den coefficient grids; grid[i][j] multiplies x^i y^j."""

    field: object
    num: Grid
    den: Grid
    symmetric: bool = False
    power: int = 1

    @property
    def bidegree(self) -> int:
        return len(self.num) - 1

    def value(self, x, y):
        """K(x, y) on raw values; ZeroDivisionError at a pole of the ratio."""
        F = self.field
        nv = _grid_eval(F, self.num, x, y)
        dv = _grid_eval(F, self.den, x, y)
        if dv == 0:
            raise ZeroDivisionError("invariant denominator vanished")
        r = F.div(nv, dv)
        return F.pow(r, self.power)

    def is_trivial(self) -> bool:
        """Constant ratio: num and den proportional grids."""
        pairs = [(a, b) for ra, rb in zip(self.num, self.den) for a, b in zip(ra, rb)]
        F = self.field
        ref = next(((a, b) for a, b in pairs if b != 0 or a != 0), None)
        if ref is None:
            return True
        ra, rb = ref
        return all(F.sub(F.mul(a, rb), F.mul(b, ra)) == 0 for a, b in pairs)


def _grid_eval(F, grid: Grid, x, y):
    acc = F.coerce(0)
    yp = [F.coerce(1)]
    for _ in range(len(grid[0]) - 1):
        yp.append(F.mul(yp[-1], y))
    xp = F.coerce(1)
    for i, row in enumerate(grid):
        if i:
            xp = F.mul(xp, x)
        for j, c in enumerate(row):
            if c != 0:
                acc = F.add(acc, F.mul(F.mul(c, xp), yp[j]))
    return acc


def grid_from_dict(field, d: int, entries: dict, symmetric: bool = False) -> Grid:
    rows = [[field.coerce(0)] * (d + 1) for _ in range(d + 1)]
    for (i, j), c in entries.items():
        rows[i][j] = field.coerce(c)
        if symmetric and i != j:
            rows[j][i] = field.coerce(c)
    return tuple(tuple(r) for r in rows)


def normalise_candidate(cand: InvariantCandidate) -> InvariantCandidate:
    """Scale so the first nonzero numerator coefficient (grid order) is 1."""
    F = cand.field
    lead = next((c for row in cand.num for c in row if c != 0), None)
    if lead is None:
        raise ValueError("cannot normalise a zero candidate")
    s = F.inv(lead)
    scale = lambda g: tuple(tuple(F.mul(c, s) for c in row) for row in g)
    return replace(cand, num=scale(cand.num), den=scale(cand.den))


# ---------------------------------------------------------------------------
# conservation check
# ---------------------------------------------------------------------------

def check_invariant(mapping: Mapping, cand: InvariantCandidate, trials: int = 24,
                    rng: random.Random | None = None, *, base: int = 1,
                    max_exclusion_ratio: float = 0.5) -> bool:
    """Exact K(x_{n+1}, x_n) = K(x_n, x_{n-1}) at sampled orbit points.

    Pole hits (of K or of the step) are excluded and counted; a run needing
    to exclude more than half its samples is rejected as invalid.
    """
    rng = rng or random.Random(0)
    F = mapping.field
    checked = excluded = 0
    budget = trials * 8
    while checked < trials and budget > 0:
        budget -= 1
        x0, x1 = F.random_nonzero(rng), F.random_nonzero(rng)
        try:
            orbit = mapping.orbit(x0, x1, min(trials - checked + 1, 12), base=base)
        except SingularOrbit:
            excluded += 1
            continue
        for n in range(1, len(orbit) - 1):
            try:
                lhs = cand.value(orbit[n + 1], orbit[n])
                rhs = cand.value(orbit[n], orbit[n - 1])
            except ZeroDivisionError:
                excluded += 1
                continue
            if lhs != rhs:
                return False
            checked += 1
    if checked < trials:
        raise AllSamplesSingular(f"only {checked}/{trials} regular samples")
    if excluded > max_exclusion_ratio * (checked + excluded):
        raise AllSamplesSingular(f"{excluded} exclusions against {checked} samples")
    return True


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

def _monomials(d: int, symmetric: bool) -> list[tuple[int, int]]:
    if symmetric:
        return [(i, j) for i in range(d + 1) for j in range(i, d + 1)]
    return [(i, j) for i in range(d + 1) for j in range(d + 1)]


def _row(F, mons, symmetric: bool, x, y) -> list:
    out = []
    for i, j in mons:
        v = F.mul(F.pow(x, i), F.pow(y, j))
        if symmetric and i != j:
            v = F.add(v, F.mul(F.pow(x, j), F.pow(y, i)))
        out.append(v)
    return out


def _nullspace(F, rows: list[list]) -> list[list]:
    """Basis of the right nullspace over the prime field (Gauss-Jordan)."""
    if not rows:
        return []
    m = [r[:] for r in rows]
    ncols = len(m[0])
    pivot_row_of: list[int] = [-1] * ncols
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        iv = F.inv(m[r][c])
        m[r] = [F.mul(v, iv) for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(m[i], m[r])]
        pivot_row_of[c] = r
        r += 1
        if r == len(m):
            break
    basis = []
    for c in range(ncols):
        if pivot_row_of[c] == -1:
            vec = [F.coerce(0)] * ncols
            vec[c] = F.coerce(1)
            for c2 in range(ncols):
                pr = pivot_row_of[c2]
                if pr != -1:
                    vec[c2] = F.neg(m[pr][c])
            basis.append(vec)
    return basis


def _rank(F, rows: list[list]) -> int:
    if not rows:
        return 0
    m = [r[:] for r in rows]
    nr, nc = len(m), len(m[0])
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        iv = F.inv(m[r][c])
        m[r] = [F.mul(v, iv) for v in m[r]]
        for i in range(r + 1, nr):
            if m[i][c] != 0:
                f = m[i][c]
                m[i] = [F.sub(a, F.mul(f, b)) for a, b in zip(m[i], m[r])]
        r += 1
    return r


def vector_in_span(F, vec: list, basis: list[list]) -> bool:
    rows = [list(b) for b in basis]
    return _rank(F, rows + [list(vec)]) == _rank(F, rows)


def grid_to_vector(F, grid: Grid, mons, symmetric: bool) -> list:
    out = []
    for i, j in mons:
        c = grid[i][j]
        if symmetric and i != j and grid[j][i] != c:
            raise ValueError("grid is not symmetric")
        out.append(c)
    return out


def vector_to_grid(F, vec: list, mons, d: int, symmetric: bool) -> Grid:
    rows = [[F.coerce(0)] * (d + 1) for _ in range(d + 1)]
    for (i, j), c in zip(mons, vec):
        rows[i][j] = c
        if symmetric and i != j:
            rows[j][i] = c
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class SearchResult:
    bidegree: int
    symmetric: bool
    monomials: tuple[tuple[int, int], ...]
    span: tuple[tuple[object, ...], ...]  # basis vectors of the union span
    candidates: tuple[InvariantCandidate, ...]

    @property
    def dimension(self) -> int:
        return len(self.span)


def _orbit_samples(mapping: Mapping, rng: random.Random, count: int,
                   parity: int | None = None) -> list[tuple]:
    """(x_n, x_{n-1}) pairs from one orbit; resamples the start on singularities."""
    F = mapping.field
    for _ in range(40):
        x0, x1 = F.random_nonzero(rng), F.random_nonzero(rng)
        need = 2 * count + 4 if parity is not None else count + 2
        try:
            orbit = mapping.orbit(x0, x1, need, base=0)
        except SingularOrbit:
            continue
        pairs = []
        for n in range(1, len(orbit)):
            if parity is not None and n % 2 != parity:
                continue
            pairs.append((orbit[n], orbit[n - 1]))
            if len(pairs) == count:
                return pairs
    raise AllSamplesSingular("could not collect a regular orbit")


def _orbit_nullspace(mapping: Mapping, d: int, symmetric: bool, rng: random.Random,
                     parity: int | None = None, retries: int = 4):
    """Nullspace of one orbit's evaluations, verified on fresh samples."""
    F = mapping.field
    mons = _monomials(d, symmetric)
    n_samples = 2 * len(mons) + 4
    for _ in range(retries):
        pairs = _orbit_samples(mapping, rng, n_samples, parity)
        rows = [_row(F, mons, symmetric, x, y) for x, y in pairs[: len(mons) + 4]]
        basis = _nullspace(F, rows)
        fresh = pairs[len(mons) + 4:]
        ok = all(
            sum_products_zero(F, vec, [_row(F, mons, symmetric, x, y) for x, y in fresh])
            for vec in basis)
        if ok:
            return basis, mons
    raise RankDeficientSamples("orbit nullspace failed fresh-sample verification")


def sum_products_zero(F, vec, rows) -> bool:
    for row in rows:
        acc = F.coerce(0)
        for c, v in zip(vec, row):
            acc = F.add(acc, F.mul(c, v))
        if acc != 0:
            return False
    return True


def search_invariant(mapping: Mapping, bidegree: int, symmetric: bool = True,
                     rng: random.Random | None = None, *,
                     orbits: int = 2) -> SearchResult:
    """Search for conserved bidegree-(d,d) ratios along sampled orbits.

    Returns the union span of the per-orbit vanishing ideals and, when the
    span is at least 2-dimensional, candidate ratios of independent span
    elements, each re-verified with fresh randomness.  An empty result means
    verified absence (fresh samples confirmed the empty nullspace), not a
    sampling failure.
    """
    rng = rng or random.Random(0)
    F = mapping.field
    span: list[list] = []
    mons = _monomials(bidegree, symmetric)
    for _ in range(orbits):
        basis, mons = _orbit_nullspace(mapping, bidegree, symmetric, rng)
        for vec in basis:
            if not vector_in_span(F, vec, span):
                span.append(vec)
    candidates = []
    if len(span) >= 2:
        num = vector_to_grid(F, span[0], mons, bidegree, symmetric)
        den = vector_to_grid(F, span[1], mons, bidegree, symmetric)
        cand = InvariantCandidate(F, num, den, symmetric=symmetric)
        if not cand.is_trivial() and check_invariant(mapping, cand, trials=20, rng=rng):
            candidates.append(normalise_candidate(cand))
    return SearchResult(bidegree, symmetric, tuple(mons),
                        tuple(tuple(v) for v in span), tuple(candidates))


def detect_squared_ratio(mapping: Mapping, rng: random.Random | None = None,
                         half_bidegree: int = 2) -> InvariantCandidate | None:
    """Recover U, V with (U/V)^2 conserved when no plain ratio of half degree is.

    Same-parity orbit samples expose the half curves; the two pure-square
    directions a*U0 + b*V0 are the roots of an exact quadratic obtained by
    projecting squares onto the full-degree span.
    """
    rng = rng or random.Random(0)
    F = mapping.field
    full = search_invariant(mapping, 2 * half_bidegree, symmetric=True, rng=rng)
    if full.dimension < 2:
        return None
    plain = search_invariant(mapping, half_bidegree, symmetric=True, rng=rng)
    if plain.dimension >= 2:
        return None  # an honest half-degree invariant exists; nothing squared
    half_span = []
    mons_h = _monomials(half_bidegree, True)
    for parity in (0, 1):
        basis, mons_h = _orbit_nullspace(mapping, half_bidegree, True, rng, parity=parity)
        for vec in basis:
            if not vector_in_span(F, vec, half_span):
                half_span.append(vec)
    if len(half_span) < 2:
        return None
    u0, v0 = half_span[0], half_span[1]
    gu = vector_to_grid(F, u0, mons_h, half_bidegree, True)
    gv = vector_to_grid(F, v0, mons_h, half_bidegree, True)
    mons_f = list(full.monomials)
    uu = grid_to_vector(F, _grid_mul(F, gu, gu), mons_f, True)
    uv = grid_to_vector(F, _grid_mul(F, gu, gv), mons_f, True)
    vv = grid_to_vector(F, _grid_mul(F, gv, gv), mons_f, True)
    lam_uu, lam_uv, lam_vv = _residuals_at_common_coordinate(
        F, [uu, uv, vv], list(map(list, full.span)))
    # (a*U0 + b*V0)^2 in span  <=>  a^2 lam_uu + 2ab lam_uv + b^2 lam_vv = 0
    roots = _projective_quadratic_roots(F, lam_uu, F.mul(F.coerce(2), lam_uv), lam_vv)
    if roots is None:
        return None
    (a1, b1), (a2, b2) = roots
    U = [F.add(F.mul(a1, u), F.mul(b1, v)) for u, v in zip(u0, v0)]
    V = [F.add(F.mul(a2, u), F.mul(b2, v)) for u, v in zip(u0, v0)]
    cand = InvariantCandidate(
        F, vector_to_grid(F, U, mons_h, half_bidegree, True),
        vector_to_grid(F, V, mons_h, half_bidegree, True), symmetric=True, power=2)
    if check_invariant(mapping, cand, trials=20, rng=rng):
        return normalise_candidate(cand)
    return None


def _grid_mul(F, a: Grid, b: Grid) -> Grid:
    da, db = len(a) - 1, len(b) - 1
    out = [[F.coerce(0)] * (da + db + 1) for _ in range(da + db + 1)]
    for i1, row1 in enumerate(a):
        for j1, c1 in enumerate(row1):
            if c1 == 0:
                continue
            for i2, row2 in enumerate(b):
                for j2, c2 in enumerate(row2):
                    if c2 != 0:
                        out[i1 + i2][j1 + j2] = F.add(out[i1 + i2][j1 + j2],
                                                      F.mul(c1, c2))
    return tuple(tuple(r) for r in out)


def _residuals_at_common_coordinate(F, vecs: list[list], span: list[list]) -> list:
    """Eliminate span from each vector, then read one shared coordinate.

    The reduced vectors here are all multiples of one direction (the image of
    the mixed product outside the span), so a single shared coordinate carries
    the full projective information; per-vector coordinates would not.
    """
    work = [list(s) for s in span]
    pivots = []
    r = 0
    nc = len(vecs[0])
    for c in range(nc):
        piv = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        iv = F.inv(work[r][c])
        work[r] = [F.mul(x, iv) for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    reduced = []
    for vec in vecs:
        v = list(vec)
        for row, c in zip(work, pivots):
            if v[c] != 0:
                f = v[c]
                v = [F.sub(x, F.mul(f, y)) for x, y in zip(v, row)]
        reduced.append(v)
    coord = next((i for i in range(nc) if any(v[i] != 0 for v in reduced)), None)
    if coord is None:
        return [F.coerce(0)] * len(vecs)
    return [v[coord] for v in reduced]


def _projective_quadratic_roots(F, A, B, C):
    """Roots (a:b) of A a^2 + B ab + C b^2 = 0, if they exist in the field."""
    if A == 0 and C == 0 and B == 0:
        return None
    if A == 0:
        # b*(B a + C b) = 0: roots (1:0) and (C:-B) if B nonzero
        if B == 0:
            return None
        return (F.coerce(1), F.coerce(0)), (C, F.neg(B))
    disc = F.sub(F.mul(B, B), F.mul(F.coerce(4), F.mul(A, C)))
    r = F.sqrt(disc)
    if r is None:
        return None
    two_a = F.mul(F.coerce(2), A)
    a1 = F.div(F.add(F.neg(B), r), two_a)
    a2 = F.div(F.sub(F.neg(B), r), two_a)
    if a1 == a2:
        return None
    return (a1, F.coerce(1)), (a2, F.coerce(1))

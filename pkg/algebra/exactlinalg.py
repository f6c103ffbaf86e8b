"""
Exact graded linear algebra over the rationals.

Graded vector spaces are finite ordered lists of named basis elements with
integer degrees; linear maps are sparse column dictionaries of Fractions.
Nothing here ever touches floating point: row reduction, nullspaces and
inverses go through sympy matrices of Rationals and come back as Fractions.

The module also builds strong deformation retract data (f, g, h) onto
cohomology, fully or partially, which is what every transfer instance
starts from.

Usage:
    V = GradedSpace((("x", 0), ("y", 1)))
    d = GradedMap.from_entries(V, V, 1, [("x", "y", 1)])
    red = cohomology_sdr(V, d)
    assert red.homotopy_identity_holds()
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import DomainError, Print

Scalar = Fraction
Vec = Dict[str, Fraction]
ScalarLike = Union[Fraction, int, str]


class LinalgError(DomainError):
    """Space mismatch, degree violation or a map that is not a differential."""


# =============================================================================
# Scalars and sparse vectors
# =============================================================================

def parse_scalar(value: ScalarLike) -> Fraction:
    """
    Parse a scalar serialized as "p/q", an integer string or an int.

    Raises:
        LinalgError: If the value is not a rational number
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise LinalgError("bad-scalar", f"Not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise LinalgError("bad-scalar", f"Not a rational number: {value!r}") from e


def format_scalar(value: Fraction) -> str:
    """Serialize a scalar as "p/q" (or "p" when integral)."""
    return str(Fraction(value))


def add_into(acc: Vec, vec: Vec, coefficient: ScalarLike = 1) -> Vec:
    """Accumulate coefficient * vec into acc in place, pruning zeros."""
    c = Fraction(coefficient)
    if c == 0:
        return acc
    for key, value in vec.items():
        total = acc.get(key, Fraction(0)) + c * value
        if total == 0:
            acc.pop(key, None)
        else:
            acc[key] = total
    return acc


def scale_vec(vec: Vec, coefficient: ScalarLike) -> Vec:
    c = Fraction(coefficient)
    if c == 0:
        return {}
    return {k: c * v for k, v in vec.items() if v != 0}


def prune(vec: Vec) -> Vec:
    return {k: Fraction(v) for k, v in vec.items() if v != 0}


def to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def from_sympy(value) -> Fraction:
    r = sympy.Rational(value)
    return Fraction(int(r.p), int(r.q))


# =============================================================================
# Graded spaces and maps
# =============================================================================

@dataclass(frozen=True)
class GradedSpace:
    """
    Finite-dimensional graded vector space with a named, ordered basis.

    Attributes:
        basis: Ordered (element id, degree) pairs; ids are unique
    """

    basis: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        normalized = tuple((str(b), int(deg)) for b, deg in self.basis)
        object.__setattr__(self, "basis", normalized)
        ids = [b for b, _ in normalized]
        if len(set(ids)) != len(ids):
            seen, dupes = set(), []
            for b in ids:
                if b in seen:
                    dupes.append(b)
                seen.add(b)
            raise LinalgError("duplicate-basis", f"Basis ids repeat: {', '.join(dupes)}")

    @cached_property
    def ids(self) -> Tuple[str, ...]:
        return tuple(b for b, _ in self.basis)

    @cached_property
    def degrees(self) -> Dict[str, int]:
        return dict(self.basis)

    @cached_property
    def index(self) -> Dict[str, int]:
        return {b: i for i, b in enumerate(self.ids)}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def degree(self, element: str) -> int:
        try:
            return self.degrees[element]
        except KeyError:
            raise LinalgError("unknown-basis", f"'{element}' is not a basis element")

    def in_degree(self, n: int) -> List[str]:
        """Basis ids of degree n, in basis order."""
        return [b for b, deg in self.basis if deg == n]

    @cached_property
    def degree_range(self) -> List[int]:
        return sorted(set(self.degrees.values()))

    def __contains__(self, element: str) -> bool:
        return element in self.degrees

    def __len__(self) -> int:
        return len(self.basis)


class GradedMap:
    """
    Degree-homogeneous linear map between graded spaces.

    Columns are sparse: columns[src][tgt] is the coefficient of tgt in the
    image of src. Zero entries are never stored, so two maps are equal
    exactly when their column dictionaries are equal.
    """

    __slots__ = ("source", "target", "degree", "columns")

    def __init__(self, source: GradedSpace, target: GradedSpace, degree: int,
                 columns: Optional[Dict[str, Vec]] = None):
        self.source = source
        self.target = target
        self.degree = int(degree)
        cleaned: Dict[str, Vec] = {}
        for src, col in (columns or {}).items():
            if src not in source:
                raise LinalgError("unknown-basis", f"Column '{src}' is not in the source space")
            kept = {}
            for tgt, value in col.items():
                value = Fraction(value)
                if value == 0:
                    continue
                if tgt not in target:
                    raise LinalgError("unknown-basis", f"Row '{tgt}' is not in the target space")
                if source.degree(src) + self.degree != target.degree(tgt):
                    raise LinalgError(
                        "degree-mismatch",
                        f"Entry {src} -> {tgt} connects degrees {source.degree(src)} and "
                        f"{target.degree(tgt)} in a map of degree {self.degree}"
                    )
                kept[tgt] = value
            if kept:
                cleaned[src] = kept
        self.columns = cleaned

    @classmethod
    def from_entries(cls, source: GradedSpace, target: GradedSpace, degree: int,
                     entries: Iterable[Tuple[str, str, ScalarLike]]) -> "GradedMap":
        columns: Dict[str, Vec] = {}
        for src, tgt, value in entries:
            col = columns.setdefault(src, {})
            col[tgt] = col.get(tgt, Fraction(0)) + parse_scalar(value)
        return cls(source, target, degree, columns)

    def apply(self, vec: Vec) -> Vec:
        """Image of a sparse vector."""
        out: Vec = {}
        for src, coefficient in vec.items():
            col = self.columns.get(src)
            if col:
                add_into(out, col, coefficient)
        return out

    def image(self, element: str) -> Vec:
        return dict(self.columns.get(element, {}))

    def entry(self, src: str, tgt: str) -> Fraction:
        return self.columns.get(src, {}).get(tgt, Fraction(0))

    def entries(self) -> List[Tuple[str, str, Fraction]]:
        """Nonzero entries in source-basis then target-basis order."""
        out = []
        for src in self.source.ids:
            col = self.columns.get(src, {})
            for tgt in self.target.ids:
                if tgt in col:
                    out.append((src, tgt, col[tgt]))
        return out

    def is_zero(self) -> bool:
        return not self.columns

    def block(self, rows: Sequence[str], cols: Sequence[str]) -> sympy.Matrix:
        """The submatrix with the given target rows and source columns."""
        return sympy.Matrix(len(rows), len(cols),
                            lambda i, j: to_sympy(self.entry(cols[j], rows[i])))

    def scaled(self, coefficient: ScalarLike) -> "GradedMap":
        c = Fraction(coefficient)
        return GradedMap(self.source, self.target, self.degree,
                         {s: scale_vec(col, c) for s, col in self.columns.items()})

    def _check_same_shape(self, other: "GradedMap") -> None:
        if self.source != other.source or self.target != other.target:
            raise LinalgError("space-mismatch", "Maps have different source or target spaces")
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise LinalgError("degree-mismatch",
                              f"Cannot add maps of degrees {self.degree} and {other.degree}")

    def __add__(self, other: "GradedMap") -> "GradedMap":
        self._check_same_shape(other)
        degree = self.degree if not self.is_zero() else other.degree
        columns: Dict[str, Vec] = {s: dict(col) for s, col in self.columns.items()}
        for s, col in other.columns.items():
            columns[s] = add_into(columns.get(s, {}), col)
        return GradedMap(self.source, self.target, degree, columns)

    def __neg__(self) -> "GradedMap":
        return self.scaled(-1)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.columns == other.columns

    __hash__ = None

    def __repr__(self) -> str:
        return (f"GradedMap(degree={self.degree}, dim {self.source.dimension} -> "
                f"{self.target.dimension}, {sum(len(c) for c in self.columns.values())} entries)")


def identity(V: GradedSpace) -> GradedMap:
    return GradedMap(V, V, 0, {b: {b: Fraction(1)} for b in V.ids})


def zero_map(source: GradedSpace, target: GradedSpace, degree: int = 0) -> GradedMap:
    return GradedMap(source, target, degree, {})


def compose(a: GradedMap, b: GradedMap) -> GradedMap:
    """
    The composite a after b.

    Raises:
        LinalgError: If b's target is not a's source
    """
    if b.target != a.source:
        raise LinalgError("space-mismatch", "compose(a, b) needs b.target == a.source")
    columns = {src: a.apply(col) for src, col in b.columns.items()}
    return GradedMap(b.source, a.target, a.degree + b.degree, columns)


def shift_space(V: GradedSpace, j: int) -> GradedSpace:
    """V[j]: same ids, an element of degree i in V has degree i - j."""
    if j == 0:
        return V
    return GradedSpace(tuple((b, deg - j) for b, deg in V.basis))


def shifted_map(phi: GradedMap, j: int = 1) -> GradedMap:
    """
    A map transported along s^{-j}: phi(s^{-j} x) = (-1)^{j deg(phi)} s^{-j} phi(x).

    Every sign coming from moving an operator past a desuspension is
    produced here and nowhere else.
    """
    sign = -1 if (j * phi.degree) % 2 else 1
    return GradedMap(shift_space(phi.source, j), shift_space(phi.target, j), phi.degree,
                     {s: scale_vec(col, sign) for s, col in phi.columns.items()})


def shift_differential(d: GradedMap, j: int = 1) -> GradedMap:
    """
    The induced differential on V[j].

    Raises:
        LinalgError: If d is not a degree 1 endomorphism
    """
    if d.degree != 1 and not d.is_zero():
        raise LinalgError("not-a-differential", f"Differential has degree {d.degree}, expected 1")
    if d.source != d.target:
        raise LinalgError("not-a-differential", "Differential must be an endomorphism")
    shifted = shifted_map(d, j)
    return GradedMap(shifted.source, shifted.target, 1, shifted.columns)


def square_zero_witness(d: GradedMap) -> Optional[str]:
    """Basis element x with d(d(x)) != 0, or None."""
    dd = compose(d, d)
    for src in d.source.ids:
        if dd.columns.get(src):
            return src
    return None


# =============================================================================
# Reductions onto cohomology
# =============================================================================

@dataclass(frozen=True)
class Reduction:
    """
    Deformation retract data between (V, d) and (E, d_E).

    f: E -> V and g: V -> E are degree 0 chain maps, h: V -> V has degree -1,
    and fg - Id = dh + hd holds exactly.
    """

    source: GradedSpace
    source_differential: GradedMap
    space: GradedSpace
    differential: GradedMap
    f: GradedMap
    g: GradedMap
    h: GradedMap

    def as_tuple(self) -> Tuple[GradedSpace, GradedMap, GradedMap, GradedMap]:
        return self.space, self.f, self.g, self.h

    def homotopy_identity_holds(self) -> bool:
        d = self.source_differential
        lhs = compose(self.f, self.g) - identity(self.source)
        rhs = compose(d, self.h) + compose(self.h, d)
        return lhs == rhs

    def chain_maps_hold(self) -> bool:
        d, dE = self.source_differential, self.differential
        return (compose(d, self.f) == compose(self.f, dE)
                and compose(dE, self.g) == compose(self.g, d))

    def side_conditions(self) -> Dict[str, bool]:
        """Which of the optional side conditions happen to hold."""
        return {
            "gf=Id": compose(self.g, self.f) == identity(self.space),
            "hf=0": compose(self.h, self.f).is_zero(),
            "gh=0": compose(self.g, self.h).is_zero(),
            "hh=0": compose(self.h, self.h).is_zero(),
        }


def _kernel_vectors(d: GradedMap, rows: List[str], cols: List[str],
                    pivots: Sequence[int]) -> List[Tuple[str, Vec]]:
    """Kernel basis of one degree block, each named by its free column."""
    free = [j for j in range(len(cols)) if j not in set(pivots)]
    if not rows:
        return [(cols[j], {cols[j]: Fraction(1)}) for j in free]
    out = []
    for vec in d.block(rows, cols).nullspace():
        entries = {cols[i]: from_sympy(vec[i]) for i in range(len(cols)) if vec[i] != 0}
        named = [cols[j] for j in free if cols[j] in entries]
        out.append((named[0], entries))
    return out


def cohomology_sdr(V: GradedSpace, d: GradedMap,
                   max_cancellations: Optional[int] = None) -> Reduction:
    """
    Gaussian-elimination retract of (V, d) onto its cohomology.

    Per degree n the pivot columns of d restricted to V^n (first nonzero
    column in basis order) span a complement C^n of the cycles, their images
    span the boundaries B^{n+1}, and cohomology representatives are kernel
    vectors chosen greedily independent of B^n. The homotopy sends each
    boundary d(c) back to -c.

    With max_cancellations=k only the first k (boundary, complement) pairs
    are cancelled; the remaining pairs stay in E with a nonzero differential.

    Args:
        V: Graded space
        d: Differential on V
        max_cancellations: Cancel at most this many acyclic pairs (None: all)

    Returns:
        Reduction with E, d_E, f, g, h

    Raises:
        LinalgError: If d is not a differential (code d-not-square-zero when d² != 0)
    """
    if d.source != V or d.target != V:
        raise LinalgError("space-mismatch", "Differential must be an endomorphism of V")
    if d.degree != 1 and not d.is_zero():
        raise LinalgError("not-a-differential", f"Differential has degree {d.degree}, expected 1")
    witness = square_zero_witness(d)
    if witness is not None:
        raise LinalgError("d-not-square-zero", f"d(d({witness})) is nonzero")

    # (degree of c, c, b = d(c)) in degree order, pivot order within a degree
    pairs: List[Tuple[int, str, Vec]] = []
    kernels: Dict[int, List[Tuple[str, Vec]]] = {}
    for n in V.degree_range:
        cols = V.in_degree(n)
        rows = V.in_degree(n + 1)
        pivots: Tuple[int, ...] = ()
        if rows:
            _, pivots = d.block(rows, cols).rref()
        for p in pivots:
            c = cols[p]
            pairs.append((n, c, d.image(c)))
        kernels[n] = _kernel_vectors(d, rows, cols, pivots)

    limit = len(pairs) if max_cancellations is None else max(0, min(max_cancellations, len(pairs)))
    cancelled = pairs[:limit]
    cancelled_ids = {c for _, c, _ in cancelled}

    E_basis: List[Tuple[str, int]] = []
    f_columns: Dict[str, Vec] = {}
    g_columns: Dict[str, Vec] = {}
    h_columns: Dict[str, Vec] = {}

    for n in V.degree_range:
        cols = V.in_degree(n)
        boundaries = [(c, b) for m, c, b in pairs if m == n - 1]
        complements = [c for m, c, _ in pairs if m == n]

        # Cohomology representatives independent of the boundaries
        chosen: List[Tuple[str, Vec]] = []
        current = [b for _, b in boundaries]
        rank = _rank(current, cols)
        for name, vec in kernels.get(n, []):
            trial = current + [vec]
            trial_rank = _rank(trial, cols)
            if trial_rank > rank:
                chosen.append((name, vec))
                current, rank = trial, trial_rank

        frame = [b for _, b in boundaries] + [v for _, v in chosen] + \
                [{c: Fraction(1)} for c in complements]
        if len(frame) != len(cols):
            raise LinalgError("internal", f"Degree {n} decomposition has the wrong size")
        if not cols:
            continue
        M = sympy.Matrix(len(cols), len(frame),
                         lambda i, j: to_sympy(frame[j].get(cols[i], Fraction(0))))
        Minv = M.inv()

        nb, nh = len(boundaries), len(chosen)
        for name, vec in chosen:
            E_basis.append((f"[{name}]", n))
        for c in complements:
            if c not in cancelled_ids:
                E_basis.append((c, n))
        for c, _ in boundaries:
            if c not in cancelled_ids:
                E_basis.append((f"d({c})", n))

        for i, x in enumerate(cols):
            coords = [from_sympy(Minv[j, i]) for j in range(len(frame))]
            g_col: Vec = {}
            h_col: Vec = {}
            for j, (c, _) in enumerate(boundaries):
                beta = coords[j]
                if beta == 0:
                    continue
                if c in cancelled_ids:
                    h_col[c] = h_col.get(c, Fraction(0)) - beta
                else:
                    g_col[f"d({c})"] = beta
            for j, (name, _) in enumerate(chosen):
                if coords[nb + j] != 0:
                    g_col[f"[{name}]"] = coords[nb + j]
            for j, c in enumerate(complements):
                gamma = coords[nb + nh + j]
                if gamma != 0 and c not in cancelled_ids:
                    g_col[c] = gamma
            g_columns[x] = g_col
            h_columns[x] = h_col

        for name, vec in chosen:
            f_columns[f"[{name}]"] = dict(vec)
        for c in complements:
            if c not in cancelled_ids:
                f_columns[c] = {c: Fraction(1)}
        for c, b in boundaries:
            if c not in cancelled_ids:
                f_columns[f"d({c})"] = dict(b)

    E = GradedSpace(tuple(E_basis))
    f = GradedMap(E, V, 0, f_columns)
    g = GradedMap(V, E, 0, g_columns)
    h = GradedMap(V, V, -1, h_columns)
    dE = compose(g, compose(d, f))
    if dE.is_zero():
        dE = zero_map(E, E, 1)
    Print("DEBUG", f"Reduction: dim {V.dimension} -> {E.dimension} "
                   f"({len(cancelled)} of {len(pairs)} pairs cancelled)")
    return Reduction(V, d, E, dE, f, g, h)


def _rank(vectors: List[Vec], cols: List[str]) -> int:
    if not vectors:
        return 0
    M = sympy.Matrix(len(cols), len(vectors),
                     lambda i, j: to_sympy(vectors[j].get(cols[i], Fraction(0))))
    return M.rank()


# =============================================================================
# JSON
# =============================================================================

def space_to_json(V: GradedSpace) -> list:
    return [[b, deg] for b, deg in V.basis]


def space_from_json(data) -> GradedSpace:
    """
    Accepts either {"basis": [[id, degree], ...]} or the bare list.

    Raises:
        LinalgError: On malformed entries
    """
    basis = data.get("basis", []) if isinstance(data, dict) else data
    try:
        return GradedSpace(tuple((str(b), int(deg)) for b, deg in basis))
    except (TypeError, ValueError) as e:
        if isinstance(e, DomainError):
            raise
        raise LinalgError("bad-space", f"Malformed basis list: {e}") from e


def map_to_json(phi: GradedMap) -> list:
    return [[src, tgt, format_scalar(v)] for src, tgt, v in phi.entries()]


def map_from_json(entries, source: GradedSpace, target: GradedSpace,
                  degree: Optional[int] = None) -> GradedMap:
    """
    Build a map from [[src, tgt, "p/q"], ...]; the degree is inferred from
    the entries when not given.
    """
    triples = [(str(s), str(t), parse_scalar(v)) for s, t, v in entries]
    if degree is None:
        found = {target.degree(t) - source.degree(s) for s, t, v in triples if v != 0}
        if len(found) > 1:
            raise LinalgError("degree-mismatch", f"Entries mix degrees {sorted(found)}")
        degree = found.pop() if found else 0
    return GradedMap.from_entries(source, target, degree, triples)


def maps_from_json(data: dict, space: GradedSpace) -> Dict[str, GradedMap]:
    """Endomorphisms listed under "maps" in a space document."""
    return {name: map_from_json(entries, space, space)
            for name, entries in data.get("maps", {}).items()}

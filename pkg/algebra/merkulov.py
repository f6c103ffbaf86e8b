"""
Transferred A-infinity operations for a dg algebra, by the classical recursion.

For a properad concentrated in biarity (1,1) (a dg algebra A) and retract
data onto E, the transferred operations on E[1] are

    lambda_1 = f
    lambda_k(x_1..x_k) = sum_{i=1}^{k-1} mu~(H_i(x_1..x_i), H_{k-i}(x_{i+1}..x_k))
    H_1 = f,  H_j = h~ lambda_j (j >= 2)
    m_k = g lambda_k

with mu~(a, b) = (-1)^{|a|+1} mu(a, b) for a of shifted degree |a|. Nothing
here touches graphs or contraction trees beyond the one 2-vertex line that
carries the algebra product, so it serves as an independent oracle for the
graph engine on linear graphs.
"""

from itertools import product
from typing import Dict, Sequence, Tuple

# Import utilities for logging - use relative import from repo root
import sys
from pathlib import Path
repo_root = Path(__file__).resolve().parent.parent
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))
from utilities import DomainError
from algebra.exactlinalg import Vec, add_into
from algebra.properad import Properad
from algebra.transfer import TransferContext
from combinatorics.graphcore import line_graph

ALGEBRA_ARITY = (1, 1)


class OracleError(DomainError):
    """The oracle only covers dg algebras."""


class MerkulovOracle:
    """Memoized classical recursion for one algebra-case context."""

    def __init__(self, ctx: TransferContext):
        if not ctx.strict or ctx.source_bimodule.arities != [ALGEBRA_ARITY] or ctx.target.arities != [ALGEBRA_ARITY]:
            raise OracleError("not-an-algebra-case", "The oracle needs a strict source concentrated in biarity (1,1)")
        self.ctx = ctx
        self.P: Properad = ctx.source
        self.A = ctx.source_bimodule.component(ALGEBRA_ARITY)
        self.f = ctx.f_hat[ALGEBRA_ARITY]
        self.g = ctx.g_hat[ALGEBRA_ARITY]
        self.h = ctx.h_hat[ALGEBRA_ARITY]
        self._line = line_graph(2)
        self._lambda: Dict[Tuple[str, ...], Vec] = {}

    def _mu_tilde(self, a: Vec, b: Vec) -> Vec:
        out: Vec = {}
        for x, cx in a.items():
            sign = -1 if self.A.degree(x) % 2 else 1
            for y, cy in b.items():
                add_into(out, self.P.composition.mu(self._line, x, y), cx * cy * sign)
        return out

    def _hat(self, xs: Tuple[str, ...]) -> Vec:
        if len(xs) == 1:
            return self.f.image(xs[0])
        return self.h.apply(self.lam(xs))

    def lam(self, xs: Sequence[str]) -> Vec:
        """lambda_k on E[1] basis elements x_1..x_k (k >= 2)."""
        xs = tuple(xs)
        if xs in self._lambda:
            return self._lambda[xs]
        out: Vec = {}
        for i in range(1, len(xs)):
            left = self._hat(xs[:i])
            if not left:
                continue
            right = self._hat(xs[i:])
            if right:
                add_into(out, self._mu_tilde(left, right))
        self._lambda[xs] = out
        return out

    def m(self, xs: Sequence[str]) -> Vec:
        """The transferred operation m_k on E[1]."""
        if len(xs) < 2:
            raise OracleError("not-an-algebra-case", "Operations start at arity 2")
        return self.g.apply(self.lam(xs))


def merkulov_oracle(ctx: TransferContext, n: int) -> Dict[Tuple[str, ...], Vec]:
    """
    Table of m_n on all basis n-tuples of E(1,1), nonzero values only.

    Raises:
        OracleError: not-an-algebra-case
    """
    if n < 2:
        raise OracleError("not-an-algebra-case", "Operations start at arity 2")
    oracle = MerkulovOracle(ctx)
    basis = ctx.target.basis(ALGEBRA_ARITY)
    table = {}
    for xs in product(basis, repeat=n):
        value = oracle.m(xs)
        if value:
            table[xs] = value
    return table

"""Exact Laurent arithmetic for truncated characters.

Variables: Y atoms ("Y", i, p), formal class markers ("F", i), and optional
unexpanded root monomials ("A", i, p).  The root monomial at (i, p) is

    A[i,p] = Y[i,p-1] Y[i,p+1] * product over neighbours j of Y[j,p]^-1,

and a tilt applied at the section slot of vertex i multiplies a class by
F[i] A[i, xi(i)+1]^-1.  Truncated fundamental characters follow the recursion
phi_i = 1 + A_i^-1 * product of phi_j over arrows j -> i, with full character
Y[i, xi(i)] phi_i; products of those are the standard truncated characters.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from .arquiver import ZQVertex
from .laurent import LaurentPoly, monomial
from .quivers import Quiver, QuiverError, Vertex


def y_var(i: Vertex, p: int, exp: int = 1) -> LaurentPoly:
    return LaurentPoly.var(("Y", i, p), exp)


def f_var(i: Vertex, exp: int = 1) -> LaurentPoly:
    return LaurentPoly.var(("F", i), exp)


def a_var(i: Vertex, p: int, exp: int = 1) -> LaurentPoly:
    return LaurentPoly.var(("A", i, p), exp)


class CharRing:
    """Character computations for a fixed quiver with a height function."""

    def __init__(self, q: Quiver, height: dict[Vertex, int] | None = None):
        self.q = q
        xi = height if height is not None else q.height_function()
        if xi is None:
            raise QuiverError("no height function available")
        self.xi = dict(xi)
        self._phi: dict[Vertex, LaurentPoly] = {}

    # -- monomial building blocks -------------------------------------------

    def a_monomial(self, i: Vertex, p: int) -> LaurentPoly:
        """The root monomial A[i,p], expanded into Y variables."""
        if i not in self.q.index:
            raise QuiverError(f"unknown vertex {i!r}")
        pairs = [(("Y", i, p - 1), 1), (("Y", i, p + 1), 1)]
        for j in self.q.neighbors(i):
            pairs.append((("Y", j, p), -1))
        return LaurentPoly.from_monomial(monomial(pairs))

    def a_inverse(self, i: Vertex, p: int) -> LaurentPoly:
        return self.a_monomial(i, p).monomial_inverse()

    def tilt_monomial(self, i: Vertex) -> LaurentPoly:
        """Class multiplier of one tilt at the section slot of i: F[i] A[i,xi+1]^-1."""
        return f_var(i) * self.a_inverse(i, self.xi[i] + 1)

    def y_of_slot(self, z: ZQVertex | Vertex) -> LaurentPoly:
        """Y variable attached to a ZQ point (or to the section slot of a vertex)."""
        if isinstance(z, ZQVertex):
            return y_var(z.vertex, 2 * z.slot - self.xi[z.vertex])
        return y_var(z, self.xi[z])

    def expand_a(self, poly: LaurentPoly) -> LaurentPoly:
        """Expand every unexpanded ("A", i, p) atom into Y variables."""
        def image(atom, exp):
            if atom[0] == "A":
                return self.a_monomial(atom[1], atom[2]) ** exp
            return LaurentPoly.var(atom, exp)
        return poly.map_atoms(image)

    # -- truncated characters --------------------------------------------------

    def fundamental_factor(self, i: Vertex) -> LaurentPoly:
        """phi_i: the renormalized truncated character of the fundamental at i."""
        if i in self._phi:
            return self._phi[i]
        out = LaurentPoly.const(1)
        prod = self.a_inverse(i, self.xi[i] + 1)
        for j in self.q.in_nbrs[i]:
            prod = prod * self.fundamental_factor(j)
        out = out + prod
        self._phi[i] = out
        return out

    def fundamental_trunc(self, i: Vertex) -> LaurentPoly:
        """Full truncated character Y[i, xi(i)] * phi_i."""
        return self.y_of_slot(i) * self.fundamental_factor(i)

    def standard_trunc(self, vertices: Iterable[Vertex]) -> LaurentPoly:
        """Product of fundamental truncated characters (ordered tensor factors)."""
        out = LaurentPoly.const(1)
        for v in vertices:
            out = out * self.fundamental_trunc(v)
        return out

    def fundamental_factor_by_subsets(self, i: Vertex) -> LaurentPoly:
        """Independent oracle for phi_i on trees: enumerate the in-closed
        vertex subsets rooted at i and multiply the matching root monomials."""
        anc = {i}
        changed = True
        while changed:
            changed = False
            for (s, t) in self.q.arrows:
                if t in anc and s not in anc:
                    anc.add(s)
                    changed = True
        anc = sorted(anc, key=self.q.index.get)
        parents = {}  # unique out-neighbour on the path toward i (trees only)
        out = LaurentPoly.zero()
        from itertools import combinations
        for r in range(len(anc) + 1):
            for combo in combinations(anc, r):
                sset = set(combo)
                if sset and i not in sset:
                    continue
                ok = True
                for v in sset:
                    if v == i:
                        continue
                    nxt = [w for w in self.q.out_nbrs[v] if w in anc]
                    if not any(w in sset for w in nxt):
                        ok = False
                        break
                if not ok:
                    continue
                term = LaurentPoly.const(1)
                for v in sset:
                    term = term * self.a_inverse(v, self.xi[v] + 1)
                out = out + term
        return out

    # -- classes of tilted objects -------------------------------------------------

    def tilt_class(self, base: Iterable[ZQVertex | Vertex], tilts) -> LaurentPoly:
        """Class monomial of a tensor object: leading Y variables of the base
        slots times one tilt multiplier per tilted copy."""
        out = LaurentPoly.const(1)
        for z in base:
            out = out * self.y_of_slot(z)
        items = tilts.items() if hasattr(tilts, "items") else ((v, 1) for v in tilts)
        for v, k in items:
            out = out * self.tilt_monomial(v) ** k
        return out

    # -- identities ----------------------------------------------------------------

    def tsystem_holds(self, i: Vertex) -> bool:
        """Exchange identity for the truncated fundamental characters at i."""
        chi_i = self.fundamental_trunc(i)
        lhs = y_var(i, self.xi[i] + 2) * chi_i
        rhs = y_var(i, self.xi[i]) * y_var(i, self.xi[i] + 2)
        prod = LaurentPoly.const(1)
        for j in self.q.out_nbrs[i]:
            prod = prod * y_var(j, self.xi[j] + 2)
        for j in self.q.in_nbrs[i]:
            prod = prod * self.fundamental_trunc(j)
        return lhs == rhs + prod


def specialize_F(poly: LaurentPoly, value: int = -1) -> LaurentPoly:
    """Replace every F atom by the scalar value (+1 or -1)."""
    return poly.substitute_unit(lambda atom: atom[0] == "F", value)


def check_tsystem(q: Quiver, height: dict[Vertex, int] | None = None) -> bool:
    ring = CharRing(q, height)
    return all(ring.tsystem_holds(i) for i in q.vertices)


@lru_cache(maxsize=None)
def cached_ring(q: Quiver) -> CharRing:
    return CharRing(q)

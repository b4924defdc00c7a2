"""Principal-coefficient cluster seeds: an oracle independent of everything else.

Seeds carry the exchange matrix (convention: b_ij counts arrows j -> i minus
arrows i -> j, which matches yhat_i = prod over arrows i -> j of u_j over
prod over arrows j -> i of u_j), the coefficient and g-vector matrices, and
per-variable F-polynomials; full Laurent expansions of the cluster variables
are reconstructed on demand through the separation formula and can optionally
be tracked through mutations directly.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

from .complexes import WeightedFn, canonical_cd_for, simple_complex_char
from .laurent import LaurentPoly, monomial
from .quivers import DimVec, Quiver, QuiverError, Vertex
from .yring import cached_ring, specialize_F


def u_var(v: Vertex, exp: int = 1) -> LaurentPoly:
    return LaurentPoly.var(("u", v), exp)


def y_coeff(v: Vertex, exp: int = 1) -> LaurentPoly:
    return LaurentPoly.var(("y", v), exp)


def exchange_matrix(q: Quiver) -> list[list[int]]:
    # b[i][j] = #(arrows j -> i) - #(arrows i -> j)
    n = len(q.vertices)
    b = [[0] * n for _ in range(n)]
    for s, t in q.arrows:
        i, j = q.index[s], q.index[t]
        b[j][i] += 1
        b[i][j] -= 1
    return b


class Seed:
    """A seed with principal coefficients (C-matrix, G-matrix, F-polynomials)."""

    def __init__(self, q: Quiver, b=None, c=None, g=None, f=None, variables=None):
        self.q = q
        self.n = len(q.vertices)
        self.b = b if b is not None else exchange_matrix(q)
        self.c = c if c is not None else [[int(i == j) for j in range(self.n)] for i in range(self.n)]
        self.g = g if g is not None else [[int(i == j) for j in range(self.n)] for i in range(self.n)]
        self.f = f if f is not None else [LaurentPoly.const(1)] * self.n
        # optional exact Laurent expansions of the cluster variables
        self.variables = variables

    @classmethod
    def initial(cls, q: Quiver, track_variables: bool = False) -> "Seed":
        variables = [u_var(v) for v in q.vertices] if track_variables else None
        return cls(q, variables=variables)

    def mutate(self, k: int) -> "Seed":
        """Mutation in direction k (an index into the vertex list); involutive."""
        if not 0 <= k < self.n:
            raise QuiverError(f"direction {k} is frozen or out of range")
        n, b, c, g, f = self.n, self.b, self.c, self.g, self.f
        pos = LaurentPoly.const(1)
        neg = LaurentPoly.const(1)
        for j in range(n):
            cjk = c[j][k]
            if cjk > 0:
                pos = pos * y_coeff(self.q.vertices[j], cjk)
            elif cjk < 0:
                neg = neg * y_coeff(self.q.vertices[j], -cjk)
            bjk = b[j][k]
            if bjk > 0:
                pos = pos * f[j] ** bjk
            elif bjk < 0:
                neg = neg * f[j] ** (-bjk)
        new_f = list(f)
        new_f[k] = (pos + neg).exact_div(f[k])

        eps = 1 if any(c[j][k] > 0 for j in range(n)) else -1
        new_g = [row[:] for row in g]
        for i in range(n):
            new_g[i][k] = -g[i][k] + sum(g[i][j] * max(0, -eps * b[j][k]) for j in range(n))
        new_c = [row[:] for row in c]
        for i in range(n):
            new_c[i][k] = -c[i][k] + sum(c[i][j] * max(0, eps * b[j][k]) for j in range(n))

        new_b = [row[:] for row in b]
        for i in range(n):
            for j in range(n):
                if i == k or j == k:
                    new_b[i][j] = -b[i][j]
                else:
                    new_b[i][j] = b[i][j] + (abs(b[i][k]) * b[k][j] + b[i][k] * abs(b[k][j])) // 2

        new_vars = None
        if self.variables is not None:
            vpos, vneg = pos_neg_exchange(self, k)
            new_vars = list(self.variables)
            new_vars[k] = (vpos + vneg).exact_div(self.variables[k])
        return Seed(self.q, new_b, new_c, new_g, new_f, new_vars)

    def variable(self, k: int) -> LaurentPoly:
        """Exact Laurent expansion of cluster variable k (separation formula)."""
        if self.variables is not None:
            return self.variables[k]
        verts = self.q.vertices
        b0 = exchange_matrix(self.q)
        expansion = LaurentPoly.zero()
        for mono, coeff in self.f[k].terms.items():
            exps = Counter()
            for atom, e in mono:
                j = self.q.index[atom[1]]
                exps[("y", atom[1])] += e
                for i in range(self.n):
                    if b0[i][j]:
                        exps[("u", verts[i])] += b0[i][j] * e
            for i in range(self.n):
                if self.g[i][k]:
                    exps[("u", verts[i])] += self.g[i][k]
            expansion = expansion + LaurentPoly.from_monomial(monomial(exps), coeff)
        return expansion

    def fingerprint(self) -> frozenset:
        """Cluster identity: the unordered set of (g-vector, F-polynomial) pairs."""
        return frozenset(
            (tuple(self.g[i][k] for i in range(self.n)), self.f[k]) for k in range(self.n))


def pos_neg_exchange(seed: Seed, k: int) -> tuple[LaurentPoly, LaurentPoly]:
    """The two exchange monomials in the tracked cluster variables."""
    pos = LaurentPoly.const(1)
    neg = LaurentPoly.const(1)
    for j in range(seed.n):
        bjk = seed.b[j][k]
        if bjk > 0:
            pos = pos * seed.variables[j] ** bjk
        elif bjk < 0:
            neg = neg * seed.variables[j] ** (-bjk)
        cjk = seed.c[j][k]
        if cjk > 0:
            pos = pos * y_coeff(seed.q.vertices[j], cjk)
        elif cjk < 0:
            neg = neg * y_coeff(seed.q.vertices[j], -cjk)
    return pos, neg


@dataclass(frozen=True)
class ClusterVariable:
    denominator: DimVec
    fpoly: LaurentPoly
    gvec: tuple
    expansion: LaurentPoly


def denominator_vector(q: Quiver, expansion: LaurentPoly) -> DimVec:
    lows = {v: 0 for v in q.vertices}
    for mono in expansion.terms:
        exps = dict.fromkeys(lows, 0)
        for atom, e in mono:
            if atom[0] == "u":
                exps[atom[1]] = e
        for v in q.vertices:
            lows[v] = min(lows[v], exps[v])
    return DimVec({v: -lo for v, lo in lows.items() if lo})


def enumerate_finite_type(q: Quiver, track_variables: bool = False,
                          max_clusters: int = 100000) -> dict[tuple, ClusterVariable]:
    """All non-initial cluster variables, keyed by denominator vector.

    Breadth-first closure over seeds with cluster-level deduplication; refuses
    non-Dynkin quivers, where the closure would not terminate.
    """
    if q.dynkin_type() is None:
        raise QuiverError("finite-type enumeration requires a Dynkin quiver")
    start = Seed.initial(q, track_variables=track_variables)
    seen = {start.fingerprint()}
    todo = deque([start])
    found: dict[tuple, ClusterVariable] = {}
    seen_vars = {(tuple(int(i == j) for i in range(start.n)), LaurentPoly.const(1))
                 for j in range(start.n)}
    while todo:
        seed = todo.popleft()
        for k in range(seed.n):
            nxt = seed.mutate(k)
            fp = nxt.fingerprint()
            if fp in seen:
                continue
            seen.add(fp)
            if len(seen) > max_clusters:
                raise RuntimeError("cluster closure exceeded the safety bound")
            todo.append(nxt)
        for k in range(seed.n):
            gkey = tuple(seed.g[i][k] for i in range(seed.n))
            vkey = (gkey, seed.f[k])
            if vkey in seen_vars:
                continue
            seen_vars.add(vkey)
            expansion = seed.variable(k)
            den = denominator_vector(q, expansion)
            key = den.key(q)
            if key in found:
                raise RuntimeError(f"two cluster variables share the denominator {den!r}")
            found[key] = ClusterVariable(den, seed.f[k], gkey, expansion)
    return found


# -- positive roots and the F-polynomial recursion --------------------------------


def positive_roots_typeA(q: Quiver) -> list[DimVec]:
    order = q.path_order()
    out = []
    for a in range(len(order)):
        for b in range(a, len(order)):
            out.append(DimVec({v: 1 for v in order[a:b + 1]}))
    return out


def is_positive_root_typeA(q: Quiver, beta: DimVec) -> bool:
    if not beta or not beta.is_nonnegative():
        return False
    if any(c != 1 for c in beta.coeffs.values()):
        return False
    order = q.path_order()
    pos = sorted(order.index(v) for v in beta.support())
    return pos == list(range(pos[0], pos[-1] + 1))


def fpoly_recursion(q: Quiver, beta: DimVec,
                    choose: Callable[[list], Vertex] | None = None) -> LaurentPoly:
    """F-polynomial of a positive root by sink peeling:
    F[beta] = F[beta - dim I_i over the support] + yhat_i F[beta - alpha_i]."""
    if not is_positive_root_typeA(q, beta):
        raise QuiverError(f"{beta!r} is not a positive root of this type A quiver")
    choose = choose or (lambda sinks: sinks[0])
    memo: dict[tuple, LaurentPoly] = {}

    def rec(b: DimVec) -> LaurentPoly:
        key = b.key(q)
        if key in memo:
            return memo[key]
        if not b:
            out = LaurentPoly.const(1)
        else:
            sub = q.support_subquiver(b)
            sinks = sorted(sub.sinks(), key=q.index.get)
            i = choose(sinks)
            out = rec(b - sub.injective_dim(i)) + y_coeff(i) * rec(b - DimVec.unit(i))
        memo[key] = out
        return out

    return rec(beta)


def fpoly_recursion_all(q: Quiver, beta: DimVec) -> set[LaurentPoly]:
    """Every output over every sink choice (independence testing)."""

    def rec(b: DimVec) -> set[LaurentPoly]:
        if not b:
            return {LaurentPoly.const(1)}
        outs: set[LaurentPoly] = set()
        sub = q.support_subquiver(b)
        for i in sub.sinks():
            for left in rec(b - sub.injective_dim(i)):
                for right in rec(b - DimVec.unit(i)):
                    outs.add(left + y_coeff(i) * right)
        return outs

    return rec(beta)


def fpoly_structure_ok(beta: DimVec, q: Quiver, fpoly: LaurentPoly) -> tuple[bool, str]:
    """Constant term 1 and a unique top monomial equal to yhat^beta."""
    if fpoly.constant_term() != 1:
        return False, "constant term differs from 1"
    target = monomial({("y", v): c for v, c in beta.coeffs.items()})
    if fpoly.terms.get(target) != 1:
        return False, "top monomial yhat^beta is missing or has coefficient != 1"
    top_total = sum(e for _, e in target)
    for mono in fpoly.terms:
        total = sum(e for _, e in mono)
        if mono != target and total >= top_total:
            return False, "top monomial is not the unique highest term"
        if any(e < 0 for _, e in mono):
            return False, "negative exponent in an F-polynomial"
    return True, ""


# -- the simple-character comparison ------------------------------------------------


def simple_char_as_fpoly(q: Quiver, beta: DimVec,
                         h: WeightedFn | None = None) -> LaurentPoly:
    """Specialize the weighted-function Euler characteristic into yhat variables:
    every F atom becomes -1 and each A[i, xi(i)+1]^-1 becomes yhat_i."""
    ring = cached_ring(q)
    h = h or canonical_cd_for(q, beta)
    chi = simple_complex_char(h, expand=False)
    chi = specialize_F(chi, -1)

    def image(atom, exp):
        if atom[0] == "A":
            if atom[2] != ring.xi[atom[1]] + 1 or exp > 0:
                raise RuntimeError(f"unexpected root-monomial atom {atom} ^ {exp}")
            return y_coeff(atom[1], -exp)
        return LaurentPoly.var(atom, exp)

    return chi.map_atoms(image)


def compare_thm_simple_chars(q: Quiver, beta: DimVec,
                             oracle: dict[tuple, ClusterVariable] | None = None,
                             h: WeightedFn | None = None) -> tuple[bool, dict]:
    """Exact equality of the weighted-complex character, the sink recursion
    and the mutation oracle's F-polynomial at denominator beta."""
    got = simple_char_as_fpoly(q, beta, h=h)
    want = fpoly_recursion(q, beta)
    payload = {"beta": str(beta), "complex": str(got), "recursion": str(want)}
    ok = got == want
    if oracle is not None:
        entry = oracle.get(beta.key(q))
        payload["oracle"] = str(entry.fpoly) if entry else "missing"
        ok = ok and entry is not None and entry.fpoly == got
    return ok, payload


@lru_cache(maxsize=None)
def cached_oracle(q: Quiver) -> dict[tuple, ClusterVariable]:
    return enumerate_finite_type(q)


def exchange_identity_holds(q: Quiver, beta: DimVec, i: Vertex,
                            oracle: dict[tuple, ClusterVariable] | None = None) -> bool:
    """Coefficient-free exchange identity at a sink i of the support of beta:

        u[beta] u_i = prod over parts of (beta - dim I_i) of u[part]
                      + prod over arrows i -> j of u_j * prod over parts of
                        (beta - alpha_i) of u[part].
    """
    oracle = oracle or cached_oracle(q)

    def coefficient_free(p: LaurentPoly) -> LaurentPoly:
        return p.substitute_unit(lambda atom: atom[0] == "y", 1)

    def u_of(gamma: DimVec) -> LaurentPoly:
        if not gamma:
            return LaurentPoly.const(1)
        out = LaurentPoly.const(1)
        for part in _interval_parts(q, gamma):
            entry = oracle.get(part.key(q))
            if entry is None:
                raise QuiverError(f"oracle is missing the root {part!r}")
            out = out * coefficient_free(entry.expansion)
        return out

    sub = q.support_subquiver(beta)
    if i not in sub.sinks():
        raise QuiverError(f"{i!r} is not a sink of the support of {beta!r}")
    lhs = u_of(beta) * u_var(i)
    rhs = u_of(beta - sub.injective_dim(i))
    tail = u_of(beta - DimVec.unit(i))
    for j in q.out_nbrs[i]:
        tail = tail * u_var(j)
    return lhs == rhs + tail


def _interval_parts(q: Quiver, gamma: DimVec) -> list[DimVec]:
    order = q.path_order()
    parts: list[DimVec] = []
    current: list[Vertex] = []
    for v in order:
        if gamma[v] == 1:
            current.append(v)
        else:
            if gamma[v] != 0:
                raise QuiverError(f"{gamma!r} is not a sum of type A roots")
            if current:
                parts.append(DimVec({w: 1 for w in current}))
                current = []
    if current:
        parts.append(DimVec({w: 1 for w in current}))
    return parts

"""Object-level skeletons of the distinguished exact complexes and their
Euler characteristics.

A standard tensor object is specified by a multiset of extended-quiver arrows
(equivalently, of quiver vertices through a canonical arrow choice); its
complex is unrolled by iterated mapping cones: peel the first factor, tilt at
its vertex, and restart on the in-arrow factors.  Only objects and degree
placement are materialized; differentials stay implicit.

Weighted quasi-additive functions c_k h_{x_k} + d_k h_{tau^-1 x_k} drive the
simple-character recursion: at a sink i of the support of the weight, add a
tau^-1 term, then also subtract the spread of the section point of i, and
combine the two branches with a tilt multiplier.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

from .exceptional import ExcFamily
from .laurent import LaurentPoly
from .quivers import STAR, DimVec, Quiver, QuiverError, Vertex
from .yring import CharRing, a_var, cached_ring, f_var


@dataclass(frozen=True)
class TiltedObject:
    factors: tuple  # quiver vertices of the tensor factors (section slots)
    tilts: tuple    # sorted ((vertex, count), ...) of applied tilts

    def tilt_counter(self) -> Counter:
        return Counter(dict(self.tilts))


def _tilt_key(q: Quiver, tilts: Counter) -> tuple:
    return tuple(sorted(tilts.items(), key=lambda kv: q.index[kv[0]]))


@lru_cache(maxsize=None)
def _skeleton_tilts(q: Quiver, verts: tuple) -> tuple[tuple[tuple, ...], ...]:
    """Per-degree tilt records of the complex on the factor-vertex multiset."""
    if not verts:
        return (((),),)  # a single degree-zero object with no tilts
    i, rest = verts[0], verts[1:]
    left = _skeleton_tilts(q, rest)
    n_verts = tuple(sorted(tuple(q.in_nbrs[i]) + rest, key=q.index.get))
    cone = _skeleton_tilts(q, n_verts)
    degrees: list[tuple[tuple, ...]] = []
    top = max(len(left), len(cone) + 1)
    for deg in range(top):
        objs = list(left[deg]) if deg < len(left) else []
        if 0 <= deg - 1 < len(cone):
            for tilts in cone[deg - 1]:
                bag = Counter(dict(tilts))
                bag[i] += 1
                objs.append(_tilt_key(q, bag))
        degrees.append(tuple(objs))
    return tuple(degrees)


def canonical_arrow(family: ExcFamily, vertex: Vertex) -> tuple[tuple, str]:
    """Arrow and multiset variant representing the fundamental factor at a vertex.

    With incoming arrows present the latest-stage one is read in the target
    convention (this is what reproduces the worked three-vertex complex);
    a source contributes its earliest-stage outgoing arrow.
    """
    q = family.q
    incoming = [a for a in family.t_map if a[1] == vertex]
    if incoming:
        return max(incoming, key=lambda a: family.t_map[a]), "target"
    outgoing = [a for a in family.t_map if a[0] == vertex]
    if not outgoing:
        raise QuiverError(f"no extended-quiver arrow at vertex {vertex!r}")
    return min(outgoing, key=lambda a: family.t_map[a]), "source"


def factor_vertex(arrow: tuple, variant: str) -> Vertex:
    if variant == "target":
        if arrow[1] == STAR:
            raise QuiverError("target variant is undefined for star arrows")
        return arrow[1]
    return arrow[0]


class StandardSpec:
    """A standard tensor object: factors, their display multisets, and weights."""

    def __init__(self, family: ExcFamily, factors: list[tuple[Vertex, list[DimVec]]]):
        self.family = family
        self.q = family.q
        order = sorted(range(len(factors)), key=lambda k: self.q.index[factors[k][0]])
        self.factors = [factors[k] for k in order]
        self.vertices = tuple(f[0] for f in self.factors)

    @classmethod
    def from_vertices(cls, family: ExcFamily, vertices: Iterable[Vertex]) -> "StandardSpec":
        factors = []
        for v in vertices:
            arrow, variant = canonical_arrow(family, v)
            factors.append((v, family.pibar_entries(arrow, variant)))
        return cls(family, factors)

    @classmethod
    def from_arrows(cls, family: ExcFamily, arrows: Iterable[tuple],
                    variant: str = "source") -> "StandardSpec":
        factors = []
        for arrow in arrows:
            if arrow not in family.t_map:
                raise QuiverError(f"unknown extended-quiver arrow {arrow!r}")
            factors.append((factor_vertex(arrow, variant),
                            family.pibar_entries(arrow, variant)))
        return cls(family, factors)

    def weight_vector(self) -> DimVec:
        out = DimVec()
        for v in self.vertices:
            out = out + self.q.injective_dim(v)
        return out

    def weight(self) -> int:
        return self.weight_vector().total()

    def base_entries(self) -> list[DimVec]:
        return [entry for _, entries in self.factors for entry in entries]


class ComplexSkeleton:
    """Per-degree lists of tilted tensor objects over a fixed base multiset."""

    def __init__(self, spec: StandardSpec):
        self.spec = spec
        self.q = spec.q
        raw = _skeleton_tilts(self.q, spec.vertices)
        self.degrees: list[list[TiltedObject]] = [
            [TiltedObject(spec.vertices, tilts) for tilts in layer] for layer in raw]

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.degrees)

    def max_degree(self) -> int:
        return len(self.degrees) - 1

    def object_count(self) -> int:
        return sum(len(layer) for layer in self.degrees)

    def display(self, obj: TiltedObject) -> list[str]:
        """Entry labels of the tilted object (tilts consume projective copies)."""
        family = self.spec.family
        q = self.q
        pending = obj.tilt_counter()
        labels = []
        for entry in self.spec.base_entries():
            swapped = False
            for v in list(pending):
                if entry == q.projective_dim(v) and pending[v] > 0:
                    labels.append(family.name(q.injective_dim(v)))
                    pending[v] -= 1
                    swapped = True
                    break
            if not swapped:
                labels.append(family.name(entry))
        if any(c > 0 for c in pending.values()):
            raise QuiverError(f"tilts {dict(pending)} exceed the available projectives")
        return labels

    def display_multisets(self) -> list[list[tuple[str, ...]]]:
        return [[tuple(self.display(o)) for o in layer] for layer in self.degrees]

    def to_json(self, ring: CharRing) -> dict:
        out = {}
        for deg, layer in enumerate(self.degrees):
            out[str(deg)] = [{
                "base": self.display(o),
                "tilts": {str(v): c for v, c in o.tilts},
                "class": str(ring.tilt_class(o.factors, o.tilt_counter())),
            } for o in layer]
        return out


def standard_complex(spec: StandardSpec) -> ComplexSkeleton:
    return ComplexSkeleton(spec)


def euler_char(skel: ComplexSkeleton, ring: CharRing | None = None) -> LaurentPoly:
    """Alternating sum of the class monomials of the skeleton objects."""
    ring = ring or cached_ring(skel.q)
    out = LaurentPoly.zero()
    sign = 1
    for layer in skel.degrees:
        for obj in layer:
            out = out + ring.tilt_class(obj.factors, obj.tilt_counter()) * sign
        sign = -sign
    return out


@lru_cache(maxsize=None)
def _chi_standard(q: Quiver, verts: tuple) -> LaurentPoly:
    if not verts:
        return LaurentPoly.const(1)
    ring = cached_ring(q)
    i, rest = verts[0], verts[1:]
    n_verts = tuple(sorted(tuple(q.in_nbrs[i]) + rest, key=q.index.get))
    step = f_var(i) * a_var(i, ring.xi[i] + 1, -1)
    return _chi_standard(q, rest) - step * _chi_standard(q, n_verts)


def euler_char_standard(spec: StandardSpec, expand: bool = True) -> LaurentPoly:
    """Renormalized Euler characteristic straight from the cone recursion."""
    out = _chi_standard(spec.q, spec.vertices)
    return cached_ring(spec.q).expand_a(out) if expand else out


# -- weighted quasi-additive functions -----------------------------------------


@dataclass(frozen=True)
class WeightedFn:
    """h = sum over k of c_k h_{x_k} + d_k h_{tau^-1 x_k}, kept as (c, d)."""
    q: Quiver
    c: tuple
    d: tuple

    @classmethod
    def from_maps(cls, q: Quiver, c: dict | DimVec, d: dict | DimVec) -> "WeightedFn":
        cm = c.coeffs if isinstance(c, DimVec) else c
        dm = d.coeffs if isinstance(d, DimVec) else d
        return cls(q, tuple(cm.get(v, 0) for v in q.vertices),
                   tuple(dm.get(v, 0) for v in q.vertices))

    def c_of(self, v: Vertex) -> int:
        return self.c[self.q.index[v]]

    def d_of(self, v: Vertex) -> int:
        return self.d[self.q.index[v]]

    def is_dominant(self) -> bool:
        return all(x >= 0 for x in self.c) and all(x >= 0 for x in self.d)

    def _replace(self, c: list[int], d: list[int]) -> "WeightedFn":
        return WeightedFn(self.q, tuple(c), tuple(d))


def omega_weight(h: WeightedFn) -> DimVec:
    """Weight vector: a_i = max(0, c_i - d_i + sum of a_j over arrows i -> j)."""
    if not h.is_dominant():
        raise QuiverError("weight extraction requires a dominant function")
    q = h.q
    a: dict[Vertex, int] = {}
    for v in q.reverse_topological_order():
        a[v] = max(0, h.c_of(v) - h.d_of(v) + sum(a[w] for w in q.out_nbrs[v]))
    return DimVec(a)


def cd_add_tauinv(h: WeightedFn, i: Vertex) -> WeightedFn:
    q = h.q
    d = list(h.d)
    d[q.index[i]] += 1
    return h._replace(list(h.c), d)


def cd_subtract_delta(h: WeightedFn, i: Vertex) -> WeightedFn:
    """Subtract the mesh spread of the section slot of i:
    c_i and d_i drop by one, in-neighbours gain on c, out-neighbours on d."""
    q = h.q
    c, d = list(h.c), list(h.d)
    c[q.index[i]] -= 1
    d[q.index[i]] -= 1
    for k in q.in_nbrs[i]:
        c[q.index[k]] += 1
    for k in q.out_nbrs[i]:
        d[q.index[k]] += 1
    out = h._replace(c, d)
    if not out.is_dominant():
        raise QuiverError(f"dominance violated when subtracting the spread at {i!r}")
    return out


def canonical_cd_for(q: Quiver, beta: DimVec) -> WeightedFn:
    """Some dominant function with weight beta (clipped difference along arrows)."""
    if not beta.is_nonnegative():
        raise QuiverError("weights are nonnegative vectors")
    c, d = {}, {}
    for v in q.vertices:
        downstream = sum(beta[w] for w in q.out_nbrs[v])
        c[v] = max(0, beta[v] - downstream)
        d[v] = max(0, downstream - beta[v])
    out = WeightedFn.from_maps(q, c, d)
    if omega_weight(out) != beta:
        raise RuntimeError(f"canonical weighted function failed its weight check at {beta!r}")
    return out


SinkChooser = Callable[[list], Vertex]


def _default_sink(sinks: list) -> Vertex:
    return sinks[0]


def simple_complex_char(h: WeightedFn, choose: SinkChooser | None = None,
                        expand: bool = False) -> LaurentPoly:
    """Renormalized Euler characteristic of the weighted-function complex.

    Recursion: at a sink i of the support of the weight, branch into
    h + tau^-1 term at i (no multiplier) and the spread-subtracted function
    (multiplied by F_i A_i^-1).  Weight zero contributes 1.
    """
    q = h.q
    ring = cached_ring(q)
    choose = choose or _default_sink
    memo: dict[tuple, LaurentPoly] = {}

    def rec(fn: WeightedFn) -> LaurentPoly:
        key = (fn.c, fn.d)
        if key in memo:
            return memo[key]
        beta = omega_weight(fn)
        if not beta:
            out = LaurentPoly.const(1)
        else:
            sub = q.support_subquiver(beta)
            sinks = sorted(sub.sinks(), key=q.index.get)
            i = choose(sinks)
            grown = cd_add_tauinv(fn, i)
            shrunk = cd_subtract_delta(grown, i)
            step = f_var(i) * a_var(i, ring.xi[i] + 1, -1)
            out = rec(grown) - step * rec(shrunk)
        memo[key] = out
        return out

    if not h.is_dominant():
        raise QuiverError("simple characters require a dominant function")
    out = rec(h)
    return ring.expand_a(out) if expand else out


def simple_complex_char_all(h: WeightedFn) -> set[LaurentPoly]:
    """Outputs over every sink choice at every step (independence testing)."""
    q = h.q
    ring = cached_ring(q)

    def rec(fn: WeightedFn) -> set[LaurentPoly]:
        beta = omega_weight(fn)
        if not beta:
            return {LaurentPoly.const(1)}
        outs: set[LaurentPoly] = set()
        sub = q.support_subquiver(beta)
        for i in sub.sinks():
            grown = cd_add_tauinv(fn, i)
            shrunk = cd_subtract_delta(grown, i)
            step = f_var(i) * a_var(i, ring.xi[i] + 1, -1)
            for left in rec(grown):
                for right in rec(shrunk):
                    outs.add(left - step * right)
        return outs

    return rec(h)


# -- rendering -------------------------------------------------------------------


def render_dot(skel: ComplexSkeleton, ring: CharRing | None = None) -> str:
    """DOT digraph: one node per object, edges labelled by the tilted vertex."""
    ring = ring or cached_ring(skel.q)
    lines = ["digraph complex {", "  rankdir=TB;"]
    names: dict[tuple[int, int], str] = {}
    for deg, layer in enumerate(skel.degrees):
        for idx, obj in enumerate(layer):
            nid = f"n{deg}_{idx}"
            names[(deg, idx)] = nid
            tensor = " (x) ".join(skel.display(obj))
            cls = ring.tilt_class(obj.factors, obj.tilt_counter())
            lines.append(f'  {nid} [label="{tensor}\\n{cls}"];')
    for deg in range(len(skel.degrees) - 1):
        for i1, o1 in enumerate(skel.degrees[deg]):
            for i2, o2 in enumerate(skel.degrees[deg + 1]):
                diff = o2.tilt_counter()
                diff.subtract(o1.tilt_counter())
                if all(v >= 0 for v in diff.values()) and sum(diff.values()) == 1:
                    (vert,) = [v for v, cnt in diff.items() if cnt == 1]
                    lines.append(
                        f'  {names[(deg, i1)]} -> {names[(deg + 1, i2)]} [label="{vert}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

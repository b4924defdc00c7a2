"""Finite acyclic quivers, dimension vectors and Euler-form arithmetic.

Vertex ids are arbitrary strings or integers; every deterministic ordering
used anywhere in the package is declaration order.  All values are immutable
after construction and every operation is a pure function.
"""
from __future__ import annotations

import json
from collections import deque
from typing import Iterable, Mapping

Vertex = object  # str | int in practice
Arrow = tuple  # (source, target)

STAR = "*"


class QuiverError(ValueError):
    pass


class FormatError(QuiverError):
    pass


class CycleError(QuiverError):
    pass


class MultiEdgeError(QuiverError):
    pass


class DimVec:
    """Sparse integer vector indexed by quiver vertices."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Vertex, int] | Iterable[tuple[Vertex, int]] = ()):
        if isinstance(coeffs, Mapping):
            coeffs = coeffs.items()
        acc: dict[Vertex, int] = {}
        for v, c in coeffs:
            c = acc.get(v, 0) + c
            if c:
                acc[v] = c
            else:
                acc.pop(v, None)
        self.coeffs = acc

    @classmethod
    def unit(cls, v: Vertex) -> "DimVec":
        return cls({v: 1})

    def __getitem__(self, v: Vertex) -> int:
        return self.coeffs.get(v, 0)

    def __add__(self, other: "DimVec") -> "DimVec":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, 0) + c
        return DimVec(out)

    def __sub__(self, other: "DimVec") -> "DimVec":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, 0) - c
        return DimVec(out)

    def __neg__(self) -> "DimVec":
        return DimVec({v: -c for v, c in self.coeffs.items()})

    def scale(self, k: int) -> "DimVec":
        return DimVec({v: k * c for v, c in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, DimVec) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs.values())

    def is_nonpositive(self) -> bool:
        return all(c <= 0 for c in self.coeffs.values())

    def support(self) -> set:
        return set(self.coeffs)

    def total(self) -> int:
        return sum(self.coeffs.values())

    def key(self, q: "Quiver") -> tuple[int, ...]:
        """Coefficients in declaration order (canonical hashable form)."""
        return tuple(self.coeffs.get(v, 0) for v in q.vertices)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return "+".join(
            (f"{c}a[{v}]" if c != 1 else f"a[{v}]")
            for v, c in sorted(self.coeffs.items(), key=lambda kv: str(kv[0]))
        )


class Quiver:
    """A finite acyclic quiver without multiple edges."""

    def __init__(self, vertices: Iterable[Vertex], arrows: Iterable[Arrow],
                 height: Mapping[Vertex, int] | None = None):
        self.vertices = tuple(vertices)
        self.arrows = tuple((s, t) for s, t in arrows)
        if len(set(self.vertices)) != len(self.vertices):
            raise FormatError("duplicate vertex declaration")
        vset = set(self.vertices)
        for s, t in self.arrows:
            if s not in vset or t not in vset:
                raise FormatError(f"arrow ({s},{t}) uses an undeclared vertex")
        if len(set(self.arrows)) != len(self.arrows):
            raise MultiEdgeError("multiple edge detected")
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.out_nbrs: dict[Vertex, tuple] = {v: () for v in self.vertices}
        self.in_nbrs: dict[Vertex, tuple] = {v: () for v in self.vertices}
        for s, t in self.arrows:
            self.out_nbrs[s] += (t,)
            self.in_nbrs[t] += (s,)
        self.topo_order = self._topological_order()  # earliest-declared source first
        self._path_counts: dict[Vertex, dict[Vertex, int]] | None = None
        self.declared_height = dict(height) if height is not None else None
        if self.declared_height is not None:
            if set(self.declared_height) != vset:
                raise FormatError("height line must assign every vertex")
            for s, t in self.arrows:
                if self.declared_height[t] != self.declared_height[s] - 1:
                    raise FormatError(f"declared height violates xi({t}) = xi({s}) - 1")

    def _topological_order(self) -> tuple:
        indeg = {v: len(self.in_nbrs[v]) for v in self.vertices}
        ready = [v for v in self.vertices if indeg[v] == 0]
        order = []
        while ready:
            v = min(ready, key=self.index.get)
            ready.remove(v)
            order.append(v)
            for w in self.out_nbrs[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
        if len(order) != len(self.vertices):
            raise CycleError("cycle detected")
        return tuple(order)

    # -- basic structure ----------------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, Quiver) and self.vertices == other.vertices
                and self.arrows == other.arrows)

    def __hash__(self):
        return hash((self.vertices, self.arrows))

    def __repr__(self) -> str:
        return f"Quiver({list(self.vertices)}, {list(self.arrows)})"

    def n(self) -> int:
        return len(self.vertices)

    def sinks(self) -> tuple:
        return tuple(v for v in self.vertices if not self.out_nbrs[v])

    def sources(self) -> tuple:
        return tuple(v for v in self.vertices if not self.in_nbrs[v])

    def underlying_edges(self) -> list[frozenset]:
        return [frozenset((s, t)) for s, t in self.arrows]

    def neighbors(self, v: Vertex) -> tuple:
        return self.out_nbrs[v] + self.in_nbrs[v]

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {self.vertices[0]}
        todo = deque(seen)
        while todo:
            v = todo.popleft()
            for w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)

    def reverse_topological_order(self) -> tuple:
        """Sinks first, the earliest-declared source last."""
        return tuple(reversed(self.topo_order))

    # -- path combinatorics -------------------------------------------------

    def path_counts(self) -> dict[Vertex, dict[Vertex, int]]:
        """p[i][j] = number of oriented paths from i to j (lazy path included)."""
        if self._path_counts is None:
            counts = {v: {v: 1} for v in self.vertices}
            for v in reversed(self.topo_order):
                row = counts[v]
                for w in self.out_nbrs[v]:
                    for target, c in counts[w].items():
                        row[target] = row.get(target, 0) + c
            self._path_counts = counts
        return self._path_counts

    def projective_dim(self, i: Vertex) -> DimVec:
        if i not in self.index:
            raise QuiverError(f"unknown vertex {i!r}")
        return DimVec(self.path_counts()[i])

    def injective_dim(self, i: Vertex) -> DimVec:
        if i not in self.index:
            raise QuiverError(f"unknown vertex {i!r}")
        counts = self.path_counts()
        return DimVec({j: counts[j].get(i, 0) for j in self.vertices})

    # -- Euler form and reflections ------------------------------------------

    def _check_support(self, v: DimVec):
        extra = v.support() - set(self.vertices)
        if extra:
            raise QuiverError(f"vertex-set mismatch: {sorted(map(str, extra))}")

    def euler_form(self, a: DimVec, b: DimVec) -> int:
        """Hereditary bilinear form <a,b> = sum a_i b_i - sum_{i->j} a_i b_j."""
        self._check_support(a)
        self._check_support(b)
        val = sum(c * b[v] for v, c in a.coeffs.items())
        for s, t in self.arrows:
            val -= a[s] * b[t]
        return val

    def sym_form(self, a: DimVec, b: DimVec) -> int:
        return self.euler_form(a, b) + self.euler_form(b, a)

    def reflect(self, beta: DimVec, v: DimVec) -> DimVec:
        """Reflection s_beta(v) = v - ((v,beta) + (beta,v)) beta, beta a real root."""
        if self.euler_form(beta, beta) != 1:
            raise QuiverError("reflection vector is not a real root (<b,b> != 1)")
        return v - beta.scale(self.sym_form(v, beta))

    # -- subquivers -----------------------------------------------------------

    def restrict(self, keep: Iterable[Vertex]) -> "Quiver":
        keep = set(keep)
        return Quiver(tuple(v for v in self.vertices if v in keep),
                      tuple(a for a in self.arrows if a[0] in keep and a[1] in keep))

    def support_subquiver(self, beta: DimVec) -> "Quiver":
        self._check_support(beta)
        if not beta.is_nonnegative():
            raise QuiverError("support subquiver requires a nonnegative vector")
        return self.restrict(beta.support())

    def delete_vertex(self, i: Vertex) -> "Quiver":
        return self.restrict(set(self.vertices) - {i})

    # -- height functions ------------------------------------------------------

    def components(self) -> list[tuple]:
        seen: set = set()
        comps = []
        for v0 in self.vertices:
            if v0 in seen:
                continue
            comp = {v0}
            todo = deque([v0])
            while todo:
                v = todo.popleft()
                for w in self.neighbors(v):
                    if w not in comp:
                        comp.add(w)
                        todo.append(w)
            seen |= comp
            comps.append(tuple(v for v in self.vertices if v in comp))
        return comps

    def height_function(self) -> dict[Vertex, int] | None:
        """A height function xi with xi(j) = xi(i) - 1 along each arrow.

        Returns the declared one when the quiver document carried it, else a
        normalized solution (value 0 at the first declared vertex of each
        component), or None when none exists.
        """
        if self.declared_height is not None:
            return dict(self.declared_height)
        xi: dict[Vertex, int] = {}
        for comp in self.components():
            xi[comp[0]] = 0
            todo = deque([comp[0]])
            while todo:
                v = todo.popleft()
                for w in self.out_nbrs[v]:
                    if w in xi:
                        if xi[w] != xi[v] - 1:
                            return None
                    else:
                        xi[w] = xi[v] - 1
                        todo.append(w)
                for w in self.in_nbrs[v]:
                    if w in xi:
                        if xi[w] != xi[v] + 1:
                            return None
                    else:
                        xi[w] = xi[v] + 1
                        todo.append(w)
        return xi

    # -- Dynkin classification ---------------------------------------------------

    def dynkin_type(self) -> str | None:
        """"A", "D" or "E" when the underlying graph is a simply-laced diagram."""
        n = len(self.vertices)
        if n == 0 or len(self.arrows) != n - 1 or not self.is_connected():
            return None
        deg = {v: len(self.neighbors(v)) for v in self.vertices}
        if any(d > 3 for d in deg.values()):
            return None
        branch = [v for v in self.vertices if deg[v] == 3]
        if not branch:
            return "A"
        if len(branch) > 1:
            return None
        c = branch[0]
        lengths = []
        for w0 in self.neighbors(c):
            length, prev, v = 1, c, w0
            while True:
                nxt = [u for u in self.neighbors(v) if u != prev]
                if not nxt:
                    break
                prev, v = v, nxt[0]
                length += 1
            lengths.append(length)
        lengths.sort()
        if lengths[0] != 1:
            return None
        if lengths[1] == 1:
            return "D"
        if lengths[1] == 2 and lengths[2] in (2, 3, 4):
            return "E"
        return None

    def path_order(self) -> list:
        """Vertices in path order (type A only)."""
        if self.dynkin_type() != "A":
            raise QuiverError("path order requires a type A quiver")
        if len(self.vertices) == 1:
            return [self.vertices[0]]
        ends = [v for v in self.vertices if len(self.neighbors(v)) == 1]
        start = min(ends, key=self.index.get)
        order, prev, v = [start], None, start
        while len(order) < len(self.vertices):
            nxt = [u for u in self.neighbors(v) if u != prev]
            prev, v = v, nxt[0]
            order.append(v)
        return order


class ExtendedQuiver:
    """The base quiver with one extra arrow i -> * per sink i."""

    def __init__(self, base: Quiver):
        if STAR in base.index:
            raise QuiverError("vertex id '*' is reserved for the star extension")
        self.base = base
        self.star_arrows = tuple((i, STAR) for i in base.sinks())
        self.arrows = base.arrows + self.star_arrows
        self.vertices = base.vertices + (STAR,)
        self.in_nbrs = {v: () for v in self.vertices}
        for s, t in self.arrows:
            self.in_nbrs[t] += (s,)

    def in_paths(self, i: Vertex) -> list[tuple[Arrow, ...]]:
        """All non-lazy oriented paths of the extended quiver arriving at i."""
        if i not in self.vertices:
            raise QuiverError(f"unknown vertex {i!r}")
        paths: list[tuple[Arrow, ...]] = []

        def extend(path: tuple[Arrow, ...], head: Vertex):
            for s in self.in_nbrs[head]:
                p = ((s, head),) + path
                paths.append(p)
                extend(p, s)

        extend((), i)
        return paths


def extend_with_star(q: Quiver) -> ExtendedQuiver:
    return ExtendedQuiver(q)


# -- quiver documents ---------------------------------------------------------


def _parse_id(token: str):
    token = token.strip()
    if not token:
        raise FormatError("empty vertex id")
    if token.lstrip("-").isdigit():
        return int(token)
    return token


def load_quiver(text: str) -> Quiver:
    """Parse a quiver document (text or the JSON equivalent).

    Text format: comma/newline-separated arrows ``a->b``, an optional
    ``vertices: a,b,c`` line fixing declaration order and isolated vertices,
    and an optional ``height: a=0,b=-1`` line.
    """
    text = text.strip()
    if not text:
        raise FormatError("empty quiver document")
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON quiver document: {exc}") from exc
        vertices = list(data.get("vertices", []))
        arrows = [tuple(a) for a in data.get("arrows", [])]
        height = data.get("height")
        if height is not None:
            height = {_coerce_json_vertex(k, vertices): int(x) for k, x in height.items()}
        declared = list(vertices)
        for s, t in arrows:
            for v in (s, t):
                if v not in declared:
                    declared.append(v)
        return Quiver(declared, arrows, height=height)

    declared: list = []
    arrows: list[Arrow] = []
    height = None
    for raw_line in text.replace(";", "\n").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("vertices:"):
            for tok in line.split(":", 1)[1].split(","):
                v = _parse_id(tok)
                if v not in declared:
                    declared.append(v)
            continue
        if line.lower().startswith("height:"):
            height = {}
            for tok in line.split(":", 1)[1].split(","):
                if "=" not in tok:
                    raise FormatError(f"bad height assignment {tok!r}")
                name, value = tok.split("=", 1)
                height[_parse_id(name)] = int(value.strip())
            continue
        for tok in line.split(","):
            tok = tok.strip()
            if not tok:
                continue
            if "->" not in tok:
                raise FormatError(f"cannot parse arrow {tok!r}")
            s_tok, t_tok = tok.split("->", 1)
            s, t = _parse_id(s_tok), _parse_id(t_tok)
            for v in (s, t):
                if v not in declared:
                    declared.append(v)
            arrows.append((s, t))
    return Quiver(declared, arrows, height=height)


def _coerce_json_vertex(k, vertices):
    if k in vertices:
        return k
    try:
        ik = int(k)
    except (TypeError, ValueError):
        return k
    return ik if ik in vertices else k


def parse_quiver_arg(spec: str) -> Quiver:
    """Inline quiver spec such as ``1->2,2->3`` (CLI convenience)."""
    return load_quiver(spec)

"""Families of complete exceptional sequences built by source-peeling.

The family E^(0), ..., E^(m) (one sequence per arrow count stage) starts at
the projectives in reverse topological order, ends at the injectives, and is
produced recursively: reflect along the stage vectors attached to the arrows
at the chosen source, delete the source, recurse, lift with the simple
numerical reflection and append the source's injective.  Everything runs at
dimension-vector level; type A runs can additionally validate with genuine
Hom computations through the interval oracle.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .arquiver import StripTable, ZQVertex, hammock_multiset, hom_intervals
from .quivers import STAR, DimVec, ExtendedQuiver, Quiver, QuiverError, Vertex, extend_with_star

DimKey = tuple  # DimVec.key(q)


class FamilyError(RuntimeError):
    pass


class DecompositionError(ValueError):
    def __init__(self, message: str, residual: Counter):
        super().__init__(message)
        self.residual = residual


@dataclass
class StageRecord:
    source: Vertex
    # one (beta_t, dim of the consumed projective) pair per arrow at the source
    steps: list[tuple[DimVec, DimVec]] = field(default_factory=list)


def initial_projective_sequence(q: Quiver) -> list[DimVec]:
    """Projectives in reverse topological order; the last entry sits at a source."""
    return [q.projective_dim(v) for v in q.reverse_topological_order()]


def _build(q: Quiver) -> tuple[list[list[DimVec]], dict[tuple, int], list[StageRecord]]:
    order = q.reverse_topological_order()
    e0 = [q.projective_dim(v) for v in order]
    if not q.arrows:
        return [e0], {}, []
    n = len(order)
    i = order[-1]
    pos = {v: l for l, v in enumerate(order)}
    ks = sorted((pos[v] for v in q.out_nbrs[i]), reverse=True)
    t_map: dict[tuple, int] = {}
    stage = StageRecord(source=i)
    seqs = [list(e0)]
    beta = q.projective_dim(i)
    for t, kpos in enumerate(ks, start=1):
        beta = beta - e0[kpos]
        stage.steps.append((beta, e0[kpos]))
        seq = []
        for l in range(n):
            if l < kpos:
                seq.append(e0[l])
            elif l < n - 1:
                seq.append(q.reflect(beta, e0[l]))
            else:
                seq.append(beta)
        seqs.append(seq)
        t_map[(i, order[kpos])] = t - 1
    r = len(ks)
    sub = q.delete_vertex(i)
    if sub.reverse_topological_order() != order[:-1]:
        raise FamilyError("subquiver ordering drifted from the parent ordering")
    sub_seqs, sub_tmap, sub_stages = _build(sub)
    alpha_i = DimVec.unit(i)
    inj_i = q.injective_dim(i)
    for t_idx, sseq in enumerate(sub_seqs):
        lifted = [q.reflect(alpha_i, v) for v in sseq] + [inj_i]
        if t_idx == 0:
            if lifted != seqs[r]:
                raise FamilyError(
                    f"stage E^({r}) disagrees between the reflection formulas and the lift")
        else:
            seqs.append(lifted)
    for arrow, t in sub_tmap.items():
        t_map[arrow] = r + t
    return seqs, t_map, [stage] + sub_stages


class ExcFamily:
    """The full family with its arrow -> stage bijection and derived multisets."""

    def __init__(self, q: Quiver):
        self.q = q
        self.ext: ExtendedQuiver = extend_with_star(q)
        self.sequences, t_map, self.stages = _build(q)
        self.m = len(q.arrows)
        self.order = q.reverse_topological_order()
        self.row_of = {v: l for l, v in enumerate(self.order)}
        self.t_map = dict(t_map)
        for arrow in self.ext.star_arrows:
            self.t_map[arrow] = self.m
        self._names = self._build_names()
        self._strip: StripTable | None = None
        self._in_paths = {v: self.ext.in_paths(v) for v in q.vertices}

    # -- access ----------------------------------------------------------------

    def entry(self, i: Vertex, t: int) -> DimVec:
        """Row entry x_i^(t)."""
        return self.sequences[t][self.row_of[i]]

    def sequence(self, t: int) -> list[DimVec]:
        return self.sequences[t]

    def betas(self) -> list[DimVec]:
        return [b for stage in self.stages for b, _ in stage.steps]

    def _build_names(self) -> dict[DimKey, str]:
        names: dict[DimKey, str] = {}
        extras = 0
        for t, seq in enumerate(self.sequences):
            for v in seq:
                names.setdefault(v.key(self.q), "")
        for j in self.q.vertices:
            names[self.q.projective_dim(j).key(self.q)] = f"P{j}"
        for j in self.q.vertices:
            key = self.q.injective_dim(j).key(self.q)
            if not names.get(key):
                names[key] = f"I{j}"
        for key in sorted(k for k, n in names.items() if not n):
            extras += 1
            names[key] = "xyzw"[extras - 1] if extras <= 4 else f"x{extras}"
        return names

    def name(self, v: DimVec) -> str:
        key = v.key(self.q)
        return self._names.get(key) or "(" + ",".join(map(str, key)) + ")"

    def strip(self) -> StripTable:
        if self._strip is None:
            self._strip = StripTable(self.q)
        return self._strip

    # -- pi multisets -------------------------------------------------------------

    def pi_below(self, i: Vertex, t: int, inclusive: bool) -> list[DimVec]:
        """Distinct row entries x_i^(s) for s <= t (or s < t), first occurrences."""
        seen: set[DimKey] = set()
        out = []
        hi = t if inclusive else t - 1
        for s in range(0, hi + 1):
            v = self.entry(i, s)
            key = v.key(self.q)
            if key not in seen:
                seen.add(key)
                out.append(v)
        return out

    def pi(self, i: Vertex) -> list[DimVec]:
        return self.pi_below(i, self.m, inclusive=True)

    def pibar(self, arrow: tuple, variant: str = "source") -> Counter:
        """The multiset attached to an extended-quiver arrow, as a Counter of dim keys.

        variant "source" reads the anchor vertex off the arrow source (the
        default convention); "target" substitutes the target vertex, which is
        what one worked three-vertex computation requires.  The discrepancy
        between the two readings is deliberately left unresolved; both are
        exposed.
        """
        if arrow not in self.t_map:
            raise QuiverError(f"unknown arrow {arrow!r}")
        if variant == "source":
            anchor = arrow[0]
        elif variant == "target":
            anchor = arrow[1]
            if anchor == STAR:
                raise QuiverError("target variant is undefined for star arrows")
        else:
            raise ValueError(f"unknown variant {variant!r}")
        bag: Counter = Counter()
        for v in self.pi_below(anchor, self.t_map[arrow], inclusive=True):
            bag[v.key(self.q)] += 1
        for path in self._in_paths[anchor]:
            first = path[0]
            for v in self.pi_below(first[0], self.t_map[first], inclusive=False):
                bag[v.key(self.q)] += 1
        return bag

    def pibar_entries(self, arrow: tuple, variant: str = "source") -> list[DimVec]:
        """Same multiset, flattened to DimVec entries in a deterministic order."""
        out = []
        for key, mult in sorted(self.pibar(arrow, variant).items()):
            out.extend([DimVec(dict(zip(self.q.vertices, key)))] * mult)
        return out

    def projective_restriction(self, bag: Counter) -> DimVec:
        """gamma with gamma_j = multiplicity of P_j inside the multiset."""
        out: dict[Vertex, int] = {}
        for j in self.q.vertices:
            c = bag.get(self.q.projective_dim(j).key(self.q), 0)
            if c:
                out[j] = c
        return DimVec(out)

    # -- table export --------------------------------------------------------------

    def table_rows(self) -> list[list[str]]:
        rows = []
        for l, v in enumerate(self.order):
            rows.append([str(v)] + [self.name(self.sequences[t][l])
                                    for t in range(self.m + 1)])
        return rows

    def table_tsv(self) -> str:
        header = "vertex\t" + "\t".join(f"t={t}" for t in range(self.m + 1))
        lines = [header]
        for row in self.table_rows():
            lines.append("\t".join(row))
        lines.append("")
        for arrow in sorted(self.t_map, key=lambda a: self.t_map[a]):
            lines.append(f"t[{arrow[0]}->{arrow[1]}] = {self.t_map[arrow]}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "rows": {str(v): [self.name(self.sequences[t][self.row_of[v]])
                              for t in range(self.m + 1)] for v in self.order},
            "dims": {str(v): [list(self.sequences[t][self.row_of[v]].key(self.q))
                              for t in range(self.m + 1)] for v in self.order},
            "t": {f"{a[0]}->{a[1]}": t for a, t in self.t_map.items()},
        }


def build_family(q: Quiver) -> ExcFamily:
    return ExcFamily(q)


# -- braid moves ------------------------------------------------------------------


def braid_sigma(q: Quiver, seq: list[DimVec], k: int, direction: str = "right") -> list[DimVec]:
    """Numerical braid move on the adjacent pair (A, B) = (seq[k], seq[k+1]).

    right: (A, B) -> (B, A - <A,B> B); left: (A, B) -> (B - <A,B> A, A).
    Results are sign-normalized; mixed signs are an error.  The two directions
    are mutually inverse.
    """
    if not 0 <= k < len(seq) - 1:
        raise IndexError("braid position out of range")
    a, b = seq[k], seq[k + 1]
    pairing = q.euler_form(a, b)
    if direction == "right":
        new = a - b.scale(pairing)
        pair = [b, _sign_normalize(new)]
    elif direction == "left":
        new = b - a.scale(pairing)
        pair = [_sign_normalize(new), a]
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return seq[:k] + pair + seq[k + 2:]


def _sign_normalize(v: DimVec) -> DimVec:
    if v.is_nonnegative():
        return v
    if v.is_nonpositive():
        return -v
    raise FamilyError(f"braid move produced a sign-incoherent vector {v!r}")


def replay_stage(q: Quiver, family: ExcFamily, stage_index: int, t: int) -> list[DimVec]:
    """Recompute E^(t+1) from E^(t) by the braid word of the first stage.

    Only stages of the top recursion level (stage_index 0) act on full
    sequences; the word moves the last object left to position k+1, exchanges
    at k, and moves the new object back to the right.
    """
    if stage_index != 0:
        raise ValueError("braid replay is exposed for the first stage only")
    order = q.reverse_topological_order()
    i = order[-1]
    pos = {v: l for l, v in enumerate(order)}
    ks = sorted((pos[v] for v in q.out_nbrs[i]), reverse=True)
    kpos = ks[t]
    n = len(order)
    seq = list(family.sequence(t))
    for j in range(n - 2, kpos - 1, -1):
        seq = braid_sigma(q, seq, j, "right")
    for j in range(kpos + 1, n - 1):
        seq = braid_sigma(q, seq, j, "left")
    return seq


# -- verification -----------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"check": self.name, "status": "pass" if self.passed else "fail",
                "detail": self.detail}


class Report:
    def __init__(self):
        self.results: list[CheckResult] = []

    def add(self, name: str, passed: bool, detail: str = ""):
        self.results.append(CheckResult(name, passed, detail))

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]


def _interval_of(q: Quiver, v: DimVec) -> set:
    if any(c != 1 for c in v.coeffs.values()):
        raise FamilyError(f"type A entry {v!r} is not thin")
    return v.support()


def verify_family(family: ExcFamily, use_hom_oracle: bool | None = None) -> Report:
    """Check the family properties, the stage-vector pairings and the
    inclusion/restriction statements for the attached multisets."""
    q = family.q
    report = Report()
    m = family.m
    if use_hom_oracle is None:
        use_hom_oracle = q.dynkin_type() == "A"

    def hom(a: DimVec, b: DimVec) -> int:
        return hom_intervals(q, _interval_of(q, a), _interval_of(q, b))

    ok, detail = True, ""
    for t, seq in enumerate(family.sequences):
        for v in seq:
            if q.euler_form(v, v) != 1 or not v.is_nonnegative():
                ok, detail = False, f"entry {v!r} at t={t}"
    report.add("entries are nonnegative real roots", ok, detail)

    ok, detail = True, ""
    for t, seq in enumerate(family.sequences):
        for b in range(len(seq)):
            for a in range(b):
                if q.euler_form(seq[b], seq[a]) != 0:
                    ok, detail = False, f"t={t}, positions {a},{b}"
                if use_hom_oracle and (hom(seq[b], seq[a]) != 0
                                       or hom(seq[b], seq[a]) - q.euler_form(seq[b], seq[a]) != 0):
                    ok, detail = False, f"hom/ext at t={t}, positions {a},{b}"
    report.add("sequences are numerically exceptional", ok, detail)

    ok = (family.sequences[0] == [q.projective_dim(v) for v in family.order]
          and family.sequences[m] == [q.injective_dim(v) for v in family.order])
    report.add("boundary sequences are the projectives and injectives", ok)

    ok, detail = True, ""
    for i in q.vertices:
        for t in range(m + 1):
            for t2 in range(t, m + 1):
                if q.euler_form(family.entry(i, t), family.entry(i, t2)) <= 0:
                    ok, detail = False, f"row {i}, t={t}, t'={t2}"
                elif use_hom_oracle and hom(family.entry(i, t), family.entry(i, t2)) == 0:
                    ok, detail = False, f"hom row {i}, t={t}, t'={t2}"
    report.add("rows have forward morphisms", ok, detail)

    ok, detail = True, ""
    for (i, j), t in family.t_map.items():
        if j == STAR:
            continue
        if family.entry(j, t + 1) != family.entry(i, t):
            ok, detail = False, f"arrow {i}->{j}"
        if q.euler_form(family.entry(j, t), family.entry(i, t + 1)) != 0:
            ok, detail = False, f"vanishing at arrow {i}->{j}"
        if use_hom_oracle and hom(family.entry(j, t), family.entry(i, t + 1)) != 0:
            ok, detail = False, f"hom vanishing at arrow {i}->{j}"
    report.add("arrow transitions identify and separate entries", ok, detail)

    ok, detail = True, ""
    for (i, j), t_a in family.t_map.items():
        if j == STAR:
            continue
        for vertex, role in [(j, "target"), (i, "source")]:
            for t in range(m + 1):
                for t2 in range(t + 1, m + 1):
                    if role == "target":
                        hit = t <= t_a < t2
                    else:
                        hit = t < t_a <= t2
                    if hit and family.entry(vertex, t) == family.entry(vertex, t2):
                        ok, detail = False, f"arrow {i}->{j} at vertex {vertex}, t={t}, t'={t2}"
    report.add("rows change across incident stages", ok, detail)

    ok, detail = True, ""
    for (i, j), t_a in family.t_map.items():
        if j == STAR:
            continue
        for (j2, k), t_b in family.t_map.items():
            if j2 == j and not t_a < t_b:
                ok, detail = False, f"{i}->{j} vs {j2}->{k}"
    report.add("stage numbers grow along paths", ok, detail)

    ok, detail = True, ""
    for stage in family.stages:
        steps = stage.steps
        for a in range(len(steps)):
            beta_a = steps[a][0]
            if q.euler_form(beta_a, steps[a][1]) != -1:
                ok, detail = False, f"consumption pairing at source {stage.source}"
            for b in range(a, len(steps)):
                if q.euler_form(beta_a, steps[b][0]) != 1:
                    ok, detail = False, f"stage chain at source {stage.source}"
    report.add("stage vectors pair correctly", ok, detail)

    ok, detail = True, ""
    for arrow in family.t_map:
        bag = family.pibar(arrow, "source")
        lower: Counter = Counter({q.projective_dim(arrow[0]).key(q): 1})
        for (i2, j2), _ in family.t_map.items():
            if j2 == arrow[0]:
                lower += family.pibar((i2, j2), "source")
        if any(bag.get(k, 0) < c for k, c in lower.items()):
            ok, detail = False, f"arrow {arrow[0]}->{arrow[1]}"
    report.add("multiset lower bound inclusion", ok, detail)

    ok, detail = True, ""
    for arrow in family.t_map:
        got = family.projective_restriction(family.pibar(arrow, "source"))
        if got != q.injective_dim(arrow[0]):
            ok, detail = False, f"arrow {arrow[0]}->{arrow[1]}: {got!r}"
    report.add("projective restriction matches the source injective", ok, detail)

    if q.dynkin_type() is not None:
        strip = family.strip()
        ok, detail = True, ""
        for arrow in family.t_map:
            x = strip.projective_slot(arrow[0])
            hx = hammock_multiset(q, x, strip)
            hbag: Counter = Counter()
            for z, c in hx.items():
                hbag[strip.dim(z).key(q)] += c
            bag = family.pibar(arrow, "source")
            if any(hbag.get(k, 0) < c for k, c in bag.items()):
                ok, detail = False, f"arrow {arrow[0]}->{arrow[1]}"
        report.add("multisets embed into the source hammock", ok, detail)

    return report


# -- dominant decomposition ----------------------------------------------------------


def solve_injective_combination(q: Quiver, gamma: DimVec) -> dict[Vertex, int] | None:
    """Nonnegative integers n with sum n_i * dim I_i = gamma, if they exist."""
    verts = list(q.vertices)
    cols = [q.injective_dim(v) for v in verts]
    mat = [[Fraction(cols[j][verts[r]]) for j in range(len(verts))] for r in range(len(verts))]
    rhs = [Fraction(gamma[v]) for v in verts]
    n = len(verts)
    for col in range(n):
        pivot = next((r for r in range(col, n) if mat[r][col]), None)
        if pivot is None:
            if any(rhs[r] for r in range(col, n)):
                return None
            continue
        mat[col], mat[pivot] = mat[pivot], mat[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        pv = mat[col][col]
        mat[col] = [x / pv for x in mat[col]]
        rhs[col] /= pv
        for r in range(n):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
                rhs[r] -= f * rhs[col]
    out = {}
    for j, v in enumerate(verts):
        val = rhs[j]
        if val.denominator != 1 or val < 0:
            return None
        if val:
            out[v] = int(val)
    return out


def compose_dominant(family: ExcFamily, z: Counter, arrows: Iterable[tuple]) -> Counter:
    bag = Counter(z)
    for arrow in arrows:
        bag += family.pibar(arrow, "source")
    return bag


def decompose_dominant(family: ExcFamily, ms: Counter) -> tuple[Counter, Counter]:
    """Recover the unique (projective-free part, arrow multiset) splitting.

    The arrow sources are read off the projective restriction; arrows are then
    peeled at sinks of the remaining support, trying the largest stage first,
    with backtracking as a safety net (the splitting is unique when it exists).
    """
    q = family.q
    gamma = family.projective_restriction(ms)
    counts = solve_injective_combination(q, gamma)
    if counts is None:
        raise DecompositionError("projective content is not a sum of injectives", ms)

    def peel(remaining: Counter, counts: dict[Vertex, int]) -> list[tuple] | None:
        live = [v for v, c in counts.items() if c]
        if not live:
            if family.projective_restriction(remaining):
                return None
            return []
        sub = q.restrict(live)
        sink = next(v for v in q.vertices if v in set(sub.sinks()))
        candidates = sorted((a for a in family.t_map if a[0] == sink),
                            key=lambda a: -family.t_map[a])
        for arrow in candidates:
            bag = family.pibar(arrow, "source")
            if any(remaining.get(k, 0) < c for k, c in bag.items()):
                continue
            rest = Counter(remaining)
            rest.subtract(bag)
            rest = Counter({k: c for k, c in rest.items() if c})
            sub_counts = dict(counts)
            sub_counts[sink] -= 1
            found = peel(rest, sub_counts)
            if found is not None:
                return [arrow] + found
        return None

    arrows = peel(Counter(ms), counts)
    if arrows is None:
        raise DecompositionError("multiset does not decompose", ms)
    residual = Counter(ms)
    for arrow in arrows:
        residual.subtract(family.pibar(arrow, "source"))
    residual = Counter({k: c for k, c in residual.items() if c})
    return residual, Counter(arrows)

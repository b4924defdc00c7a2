"""Sparse multivariate Laurent polynomials with exact integer coefficients.

Variables are arbitrary hashable "atoms" (tuples like ``("Y", 2, -1)`` or
``("u", 3)``); a monomial is a canonically sorted tuple of (atom, exponent)
pairs with nonzero exponents.  Everything is immutable and exact; there is no
floating point anywhere.
"""
from __future__ import annotations

from typing import Callable, Iterable, Mapping

Atom = tuple
Monomial = tuple  # tuple of (atom, exponent) pairs, canonically sorted

ONE: Monomial = ()


def _atom_key(atom: Atom):
    # stable across mixed int/str vertex ids
    return tuple(str(part) for part in atom)


def monomial(pairs: Mapping[Atom, int] | Iterable[tuple[Atom, int]]) -> Monomial:
    """Canonical monomial from atom -> exponent data (zero exponents dropped)."""
    if isinstance(pairs, Mapping):
        pairs = pairs.items()
    acc: dict[Atom, int] = {}
    for atom, exp in pairs:
        acc[atom] = acc.get(atom, 0) + exp
    return tuple(sorted(((a, e) for a, e in acc.items() if e), key=lambda p: _atom_key(p[0])))


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    return monomial(list(m1) + list(m2))


def mono_pow(m: Monomial, k: int) -> Monomial:
    return tuple((a, e * k) for a, e in m) if k else ONE


class LaurentPoly:
    """Immutable Laurent polynomial: a finite map monomial -> nonzero int."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        self.terms: dict[Monomial, int] = {m: c for m, c in (terms or {}).items() if c}
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({ONE: c}) if c else cls()

    @classmethod
    def var(cls, atom: Atom, exp: int = 1, coeff: int = 1) -> "LaurentPoly":
        return cls({monomial({atom: exp}): coeff})

    @classmethod
    def from_monomial(cls, m: Monomial, coeff: int = 1) -> "LaurentPoly":
        return cls({m: coeff})

    # -- ring operations ----------------------------------------------------

    def __add__(self, other) -> "LaurentPoly":
        other = _coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "LaurentPoly":
        other = _coerce(other)
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            inv = self.monomial_inverse()
            return inv ** (-k)
        result = LaurentPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def monomial_inverse(self) -> "LaurentPoly":
        """Inverse of a single-term poly with unit coefficient."""
        if len(self.terms) != 1:
            raise ValueError("only monomials are invertible in a Laurent ring")
        (m, c), = self.terms.items()
        if c not in (1, -1):
            raise ValueError("coefficient is not a unit over the integers")
        return LaurentPoly({mono_pow(m, -1): c})

    # -- queries ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> int:
        return self.terms.get(ONE, 0)

    def coefficients(self) -> list[int]:
        return list(self.terms.values())

    def atoms(self) -> set[Atom]:
        return {a for m in self.terms for a, _ in m}

    def __len__(self) -> int:
        return len(self.terms)

    # -- substitution -------------------------------------------------------

    def map_atoms(self, fn: Callable[[Atom, int], "LaurentPoly"]) -> "LaurentPoly":
        """Rewrite each atom via ``fn(atom, exponent) -> LaurentPoly``.

        The images of distinct atoms within one monomial are multiplied.
        """
        out = LaurentPoly.zero()
        for m, c in self.terms.items():
            term = LaurentPoly.const(c)
            for atom, exp in m:
                term = term * fn(atom, exp)
            out = out + term
        return out

    def substitute_unit(self, pred: Callable[[Atom], bool], value: int) -> "LaurentPoly":
        """Replace every atom matching ``pred`` by the scalar ``value`` (+1/-1)."""
        if value not in (1, -1):
            raise ValueError("unit substitution requires value +1 or -1")
        out: dict[Monomial, int] = {}
        for m, c in self.terms.items():
            kept = []
            sign = 1
            for atom, exp in m:
                if pred(atom):
                    if value == -1 and exp % 2:
                        sign = -sign
                else:
                    kept.append((atom, exp))
            mm = monomial(kept)
            v = out.get(mm, 0) + sign * c
            if v:
                out[mm] = v
            else:
                out.pop(mm, None)
        return LaurentPoly(out)

    # -- exact division -----------------------------------------------------

    def exact_div(self, divisor: "LaurentPoly", max_steps: int = 100000) -> "LaurentPoly":
        """Exact division; raises ``ValueError`` when the quotient does not exist.

        Greedy leading-term elimination under a lex order on exponent vectors.
        For an exact quotient this terminates in exactly ``len(quotient)``
        steps; the step cap only guards against an inexact input.
        """
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly.zero()
        atoms = sorted(self.atoms() | divisor.atoms(), key=_atom_key)
        index = {a: i for i, a in enumerate(atoms)}

        def key(m: Monomial):
            vec = [0] * len(atoms)
            for a, e in m:
                vec[index[a]] = e
            return tuple(vec)

        div_lead = max(divisor.terms, key=key)
        div_lc = divisor.terms[div_lead]
        div_lead_inv = mono_pow(div_lead, -1)

        remainder = self
        quotient: dict[Monomial, int] = {}
        for _ in range(max_steps):
            if remainder.is_zero():
                return LaurentPoly(quotient)
            lead = max(remainder.terms, key=key)
            lc = remainder.terms[lead]
            if lc % div_lc:
                raise ValueError("not an exact division (coefficient)")
            t_mono = mono_mul(lead, div_lead_inv)
            t_coeff = lc // div_lc
            quotient[t_mono] = t_coeff
            remainder = remainder - LaurentPoly({t_mono: t_coeff}) * divisor
        raise ValueError("not an exact division (no termination)")

    # -- printing -----------------------------------------------------------

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda mm: tuple(( _atom_key(a), e) for a, e in mm)):
            c = self.terms[m]
            s = monomial_str(m)
            if s == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(s)
            elif c == -1:
                parts.append("-" + s)
            else:
                parts.append(f"{c}*{s}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def as_dict(self) -> dict[str, int]:
        """JSON-friendly emission ``{monomial string: coefficient}``."""
        return {monomial_str(m): c for m, c in sorted(self.terms.items(), key=lambda kv: monomial_str(kv[0]))}


def _coerce(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly.const(x)
    raise TypeError(f"cannot coerce {type(x)!r} into LaurentPoly")


_KIND_ORDER = {"Y": 0, "F": 1, "A": 2}


def monomial_str(m: Monomial) -> str:
    """Canonical string, e.g. ``Y[1,-1] Y[2,0]^-1 F[2] A[3,0]^-1``."""
    if not m:
        return "1"

    def sort_key(pair):
        atom, _ = pair
        kind = atom[0]
        return (_KIND_ORDER.get(kind, 9), str(kind), tuple(str(x) for x in atom[1:]))

    parts = []
    for atom, exp in sorted(m, key=sort_key):
        name = f"{atom[0]}[{','.join(str(x) for x in atom[1:])}]"
        parts.append(name if exp == 1 else f"{name}^{exp}")
    return " ".join(parts)

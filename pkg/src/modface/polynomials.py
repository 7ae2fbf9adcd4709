"""Small sparse multivariate polynomials with exact rational coefficients.

Only what the planar-section computations need: ring arithmetic, substitution,
partial derivatives, 3x3 determinants and division by a single polynomial in lex
order.  Coefficients are :class:`fractions.Fraction` (or anything closed under
``+``, ``*`` that compares to zero, e.g. floats for sampling work).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number


class Poly:
    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms=None):
        self.vars = tuple(variables)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != len(self.vars):
                raise ValueError("exponent length does not match the variables")
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}

    # constructors ----------------------------------------------------------

    @classmethod
    def const(cls, variables, c):
        return cls(variables, {(0,) * len(variables): Fraction(c) if isinstance(c, int) else c})

    @classmethod
    def var(cls, variables, name):
        exp = tuple(1 if v == name else 0 for v in variables)
        if sum(exp) != 1:
            raise ValueError(f"unknown variable {name!r}")
        return cls(variables, {exp: Fraction(1)})

    @classmethod
    def gens(cls, variables):
        return tuple(cls.var(variables, v) for v in variables)

    # arithmetic -------------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise ValueError("polynomials live in different rings")
            return other
        if isinstance(other, Number):
            return Poly.const(self.vars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Poly.const(self.vars, 1)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    # structure --------------------------------------------------------------

    def degree(self, name=None):
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e) for e in self.terms)
        i = self.vars.index(name)
        return max(e[i] for e in self.terms)

    def homogeneous_part(self, k):
        return Poly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == k})

    def coefficient(self, name, k):
        """Coefficient of ``name**k`` as a polynomial in the other variables."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                e2 = e[:i] + (0,) + e[i + 1 :]
                out[e2] = out.get(e2, 0) + c
        return Poly(self.vars, out)

    def diff(self, name):
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = e[:i] + (e[i] - 1,) + e[i + 1 :]
                out[e2] = out.get(e2, 0) + c * e[i]
        return Poly(self.vars, out)

    def subs(self, values: dict):
        """Substitute numbers or polynomials (same ring) for some variables."""
        out = Poly(self.vars)
        idx = {self.vars.index(k): v for k, v in values.items()}
        for e, c in self.terms.items():
            term = Poly(self.vars, {tuple(0 if i in idx else k for i, k in enumerate(e)): c})
            for i, v in idx.items():
                if e[i]:
                    term = term * (v ** e[i] if isinstance(v, Poly) else Poly.const(self.vars, v ** e[i]))
            out = out + term
        return out

    def __call__(self, **values):
        """Full evaluation; every variable must be given."""
        total = 0
        for e, c in self.terms.items():
            t = c
            for name, k in zip(self.vars, e):
                if k:
                    t = t * values[name] ** k
            total = total + t
        return total

    def constant(self):
        if any(sum(e) for e in self.terms):
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def leading(self):
        """Lex-leading ``(exponent, coefficient)``."""
        e = max(self.terms)
        return e, self.terms[e]

    def divmod(self, divisor: Poly):
        """Multivariate division by one polynomial in lex order: ``self = q*divisor + r``."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lead_e, lead_c = divisor.leading()
        q = Poly(self.vars)
        r = Poly(self.vars)
        p = self
        while not p.is_zero():
            e, c = p.leading()
            if all(a >= b for a, b in zip(e, lead_e)):
                t = Poly(self.vars, {tuple(a - b for a, b in zip(e, lead_e)): c / lead_c})
                q = q + t
                p = p - t * divisor
            else:
                lt = Poly(self.vars, {e: c})
                r = r + lt
                p = p - lt
        return q, r

    def map_coeffs(self, fn):
        return Poly(self.vars, {e: fn(c) for e, c in self.terms.items()})

    def to_dict(self):
        return {
            "vars": list(self.vars),
            "terms": [[list(e), str(c)] for e, c in sorted(self.terms.items(), reverse=True)],
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["vars"], {tuple(e): Fraction(c) for e, c in doc["terms"]})

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def det3(m):
    """Cofactor expansion of a 3x3 array of polynomials or numbers."""
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )

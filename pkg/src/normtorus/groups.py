"""
Finite abelian groups in prime-power invariant-factor form, alternating
bilinear forms A x A -> Q/Z, admissible sets and the log-exponent alpha(A).

Elements are plain tuples of residues (c_1, ..., c_k) with 0 <= c_i < d_i.
Everything here is exact integer / Fraction arithmetic; groups are desk
scale (|A| up to a few thousand) so subgroups are materialized sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, lcm, prod

from sympy import factorint, Matrix
from sympy.matrices.normalforms import smith_normal_form

Element = tuple


class FiniteAbelianGroup:
    """A = Z/d_1 + ... + Z/d_k with each d_i a prime power >= 2."""

    def __init__(self, factors):
        factors = tuple(int(d) for d in factors)
        if not factors:
            raise ValueError("group must be nontrivial")
        for d in factors:
            f = factorint(d)
            if d < 2 or len(f) != 1:
                raise ValueError(f"factor {d} is not a prime power >= 2")
        self.factors = factors
        self.factor_primes = tuple(next(iter(factorint(d))) for d in factors)
        self.order = prod(factors)
        self.exponent = lcm(*factors)
        self.ell = min(factorint(self.order))
        # moduli of the free coefficients of an alternating form
        self.pair_moduli = {
            (i, j): gcd(factors[i], factors[j])
            for i in range(len(factors))
            for j in range(i + 1, len(factors))
        }
        self.pair_lcm = lcm(*self.pair_moduli.values()) if self.pair_moduli else 1

    # -- element arithmetic -------------------------------------------------

    @property
    def zero(self) -> Element:
        return (0,) * len(self.factors)

    def elements(self):
        if not hasattr(self, "_elements"):
            self._elements = list(product(*[range(d) for d in self.factors]))
        return self._elements

    def nonzero_elements(self):
        return [a for a in self.elements() if a != self.zero]

    def _tables(self):
        # lookup tables for the element arithmetic of small groups
        if not hasattr(self, "_add_t"):
            els = self.elements()
            self._add_t = {
                (a, b): tuple((x + y) % d for x, y, d in zip(a, b, self.factors))
                for a in els for b in els
            }
            self._neg_t = {a: tuple((-x) % d for x, d in zip(a, self.factors))
                           for a in els}
            self._ord_t = {a: lcm(*(d // gcd(d, x) for x, d in zip(a, self.factors)))
                           for a in els}
            self._smul_t = {
                (m, a): tuple((m * x) % d for x, d in zip(a, self.factors))
                for m in range(self.exponent) for a in els
            }
        return self._add_t

    def add(self, a: Element, b: Element) -> Element:
        if self.order <= 64:
            return self._tables()[(a, b)]
        return tuple((x + y) % d for x, y, d in zip(a, b, self.factors))

    def neg(self, a: Element) -> Element:
        if self.order <= 64:
            self._tables()
            return self._neg_t[a]
        return tuple((-x) % d for x, d in zip(a, self.factors))

    def smul(self, m: int, a: Element) -> Element:
        if self.order <= 64:
            self._tables()
            return self._smul_t[(m % self.exponent, a)]
        return tuple((m * x) % d for x, d in zip(a, self.factors))

    def element_order(self, a: Element) -> int:
        if self.order <= 64:
            self._tables()
            return self._ord_t[a]
        return lcm(*(d // gcd(d, x) for x, d in zip(a, self.factors)))

    def contains(self, a) -> bool:
        return (
            isinstance(a, tuple)
            and len(a) == len(self.factors)
            and all(0 <= x < d for x, d in zip(a, self.factors))
        )

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        return f"FiniteAbelianGroup({list(self.factors)})"

    def describe(self) -> str:
        return ".".join(str(d) for d in self.factors)

    # -- subgroups ----------------------------------------------------------

    def span(self, gens) -> "Subgroup":
        """Subgroup generated by gens, materialized."""
        gens = [g for g in gens]
        seen = {self.zero}
        frontier = [self.zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return Subgroup(self, frozenset(seen), tuple(gens))

    def torsion(self, m: int) -> "Subgroup":
        """A[m] = {a : m*a = 0}."""
        els = [a for a in self.elements() if self.smul(m, a) == self.zero]
        return Subgroup(self, frozenset(els), ())

    def multiple(self, m: int) -> "Subgroup":
        """mA = {m*a}."""
        els = {self.smul(m, a) for a in self.elements()}
        return Subgroup(self, frozenset(els), ())

    def wedge_dual_order(self) -> int:
        """|Hom(wedge^2 A, Q/Z)| = prod of the pair moduli g_ij."""
        return prod(self.pair_moduli.values()) if self.pair_moduli else 1


@dataclass(frozen=True)
class Subgroup:
    group: FiniteAbelianGroup
    elements: frozenset
    generators: tuple = ()

    def __post_init__(self):
        assert self.group.zero in self.elements

    def __contains__(self, a):
        return a in self.elements

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.group == other.group and self.elements == other.elements

    def __hash__(self):
        return hash((self.group, self.elements))

    def sorted_elements(self):
        return sorted(self.elements)


# -- alternating forms ------------------------------------------------------

def restriction_is_zero(A: FiniteAbelianGroup, a: Element, b: Element) -> bool:
    """True iff every alternating map lambda: A x A -> Q/Z kills (a, b).

    Closed test: g_ij | (a_i b_j - a_j b_i) for all factor pairs i < j.
    """
    return all(
        (a[i] * b[j] - a[j] * b[i]) % g == 0 for (i, j), g in A.pair_moduli.items()
    )


def all_alternating_forms(A: FiniteAbelianGroup):
    """All alternating forms as dicts (i,j) -> numerator of lambda(e_i,e_j)
    in (1/g_ij)Z/Z.  Exponential in the number of factor pairs; oracle use only.
    """
    keys = sorted(A.pair_moduli)
    for combo in product(*[range(A.pair_moduli[k]) for k in keys]):
        yield dict(zip(keys, combo))


def form_value(A: FiniteAbelianGroup, form: dict, a: Element, b: Element) -> Fraction:
    """lambda(a, b) in Q/Z for the form given by its basis coefficients."""
    # common denominator L = lcm of the pair moduli keeps this in integers
    L = A.pair_lcm
    total = 0
    for (i, j), num in form.items():
        total += num * (a[i] * b[j] - a[j] * b[i]) * (L // A.pair_moduli[(i, j)])
    return Fraction(total % L, L)


def form_vanishes_on(A: FiniteAbelianGroup, form: dict, D: Subgroup) -> bool:
    gens = D.generators if D.generators else tuple(D.sorted_elements())
    L = A.pair_lcm
    for x in gens:
        for y in gens:
            v = 0
            for (i, j), num in form.items():
                v += num * (x[i] * y[j] - x[j] * y[i]) * (L // A.pair_moduli[(i, j)])
            if v % L != 0:
                return False
    return True


# -- the S subspace, admissible sets, alpha ---------------------------------

def s_subspace(A: FiniteAbelianGroup) -> Subgroup:
    """A[l] intersect lA for l the smallest prime divisor of |A|."""
    tor = A.torsion(A.ell).elements
    mul = A.multiple(A.ell).elements
    return Subgroup(A, frozenset(tor & mul), ())


def adm_set(A: FiniteAbelianGroup, a: Element) -> Subgroup:
    """Adm(a) = {b : the restriction of every alternating form to <a,b> is zero}."""
    if a == A.zero:
        raise ValueError("a must be nonzero")
    if A.smul(A.ell, a) != A.zero:
        raise ValueError("a must lie in the l-torsion")
    els = frozenset(b for b in A.elements() if restriction_is_zero(A, a, b))
    return Subgroup(A, els, ())


def alpha(A: FiniteAbelianGroup) -> Fraction:
    """Sum over a in A[l]-{0} of |Adm(a)| / ((l-1)|A|), exact."""
    ell = A.ell
    total = Fraction(0)
    for a in A.torsion(ell).elements:
        if a == A.zero:
            continue
        total += Fraction(len(adm_set(A, a)), (ell - 1) * A.order)
    return total


def alpha_total(A: FiniteAbelianGroup) -> Fraction:
    """(|A[l]| - 1)/(l - 1): the unconstrained log-power exponent."""
    return Fraction(len(A.torsion(A.ell)) - 1, A.ell - 1)


# -- automorphism count -----------------------------------------------------

def aut_order(A: FiniteAbelianGroup) -> int:
    """|Aut(A)| by the Hillar-Rhea formula applied per primary component."""
    primary: dict[int, list[int]] = {}
    for d, p in zip(A.factors, A.factor_primes):
        primary.setdefault(p, []).append(factorint(d)[p])
    total = 1
    for p, exps in primary.items():
        e = sorted(exps)
        n = len(e)
        dk = [max(l for l in range(n) if e[l] == e[k]) + 1 for k in range(n)]
        ck = [min(l for l in range(n) if e[l] == e[k]) + 1 for k in range(n)]
        t = 1
        for k in range(n):
            t *= p ** dk[k] - p ** k
        for j in range(n):
            t *= p ** (e[j] * (n - dk[j]))
        for i in range(n):
            t *= p ** ((e[i] - 1) * (n - ck[i] + 1))
        total *= t
    return total


# -- Sha dual order ---------------------------------------------------------

def sha_dual_dimension(A: FiniteAbelianGroup, subgroups) -> int:
    """Order of {alternating forms on A vanishing on D x D for every listed D}.

    Solved as a linear divisibility system on the coefficients
    c_ij in Z/g_ij: for generators x, y of each D,
    sum_{i<j} (x_i y_j - x_j y_i) (L/g_ij) c_ij = 0 mod L,  L = lcm(g_ij).
    Solution count = prod(g_ij) / |image|, image computed via Smith normal form.
    """
    keys = sorted(A.pair_moduli)
    if not keys:
        return 1
    moduli = [A.pair_moduli[k] for k in keys]
    L = lcm(*moduli)
    rows = set()
    for D in subgroups:
        gens = D.generators if D.generators else tuple(D.sorted_elements())
        for x in gens:
            for y in gens:
                row = tuple(
                    ((x[i] * y[j] - x[j] * y[i]) * (L // A.pair_moduli[(i, j)])) % L
                    for (i, j) in keys
                )
                if any(row):
                    rows.add(row)
    if not rows:
        return prod(moduli)
    rows = sorted(rows)
    m, k = len(rows), len(keys)
    # |image of (c_ij) -> M c in (Z/L)^m| = L^m / |coker([M | L*I])|
    M = Matrix(m, k + m, lambda r, c: rows[r][c] if c < k else (L if c - k == r else 0))
    snf = smith_normal_form(M)
    coker = prod(abs(snf[i, i]) for i in range(m))
    image = L ** m // coker
    return prod(moduli) // image

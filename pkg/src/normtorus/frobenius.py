"""
Canonical Frobenius evaluation for tuple-parametrized abelian extensions,
decomposition subgroups at ramified places, and per-field verdicts:
|Sha(T)|, |A(T)|, weak approximation, Hasse norm principle.

Normalization: for each odd prime q the generator of the cyclotomic
character group at q acts as the least primitive root g modulo q^{1+k}
(k = wild depth needed); 2-adically odd residues decompose as +-5^k and
the exponent k is the canonical coordinate; the sign of an entry
contributes the index itself at primes p = 3 mod 4.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from sympy import factorint, jacobi_symbol, primitive_root
from sympy.ntheory.residue_ntheory import discrete_log

from .groups import (
    Element,
    FiniteAbelianGroup,
    Subgroup,
    sha_dual_dimension,
)
from .tuples import ExtensionTuple

NORMALIZATION_VERSION = "lpr-pm5-1"


@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple:
    """Distinct prime factors of n (entries repeat massively across tuples)."""
    return tuple(factorint(n))


@lru_cache(maxsize=None)
def _jacobi_is_square(p: int, q: int) -> bool:
    return jacobi_symbol(p, q) == 1


class CharacterNormalization:
    """Least-primitive-root discrete logs mod q^{1+k}, with table memoization."""

    def __init__(self, table_limit: int = 200_000):
        self.table_limit = table_limit
        self._roots: dict[tuple, int] = {}
        self._tables: dict[tuple, dict] = {}
        self._dlogs: dict[tuple, int] = {}

    version = NORMALIZATION_VERSION

    def root(self, q: int, depth: int = 0) -> int:
        key = (q, depth)
        if key not in self._roots:
            self._roots[key] = int(primitive_root(q ** (1 + depth)))
        return self._roots[key]

    def dlog(self, q: int, x: int, depth: int = 0) -> int:
        """Discrete log of x base the least primitive root in (Z/q^{1+depth})^*."""
        mod = q ** (1 + depth)
        x %= mod
        if x % q == 0:
            raise ValueError(f"{x} not a unit mod {mod}")
        key = (q, depth, x)
        if key in self._dlogs:
            return self._dlogs[key]
        g = self.root(q, depth)
        if mod <= self.table_limit:
            tkey = (q, depth)
            if tkey not in self._tables:
                table, y, k = {}, 1, 0
                group_order = mod // q * (q - 1)
                while k < group_order:
                    table[y] = k
                    y = y * g % mod
                    k += 1
                self._tables[tkey] = table
            d = self._tables[tkey][x]
        else:
            d = int(discrete_log(mod, x, g))
        self._dlogs[key] = d
        return d

    def two_adic_log(self, x: int, bits: int) -> int:
        """k with x = +-5^k mod 2^bits (bits >= 3)."""
        mod = 1 << bits
        x %= mod
        y, k = 1, 0
        half = mod >> 2
        while k < half:
            if y == x or mod - y == x:
                return k
            y = y * 5 % mod
            k += 1
        raise ValueError(f"{x} not odd mod {mod}")


@dataclass(frozen=True)
class LocalData:
    place: object          # prime or "oo"
    inertia_gens: tuple    # generating indices of the inertia image
    frobenius: Element     # a lift, well-defined modulo the inertia image

    def decomposition(self, A: FiniteAbelianGroup) -> Subgroup:
        return A.span(list(self.inertia_gens) + [self.frobenius])

    @property
    def noncyclic_inertia(self) -> bool:
        return len(self.inertia_gens) > 1


def _frob_sum(t: ExtensionTuple, p: int, norm: CharacterNormalization,
              skip_two_adic: bool = False) -> Element:
    """Sum of all place contributions at the evaluation prime p, skipping
    the place p itself (and optionally all 2-adic/sign contributions)."""
    A = t.group
    out = A.zero
    for a, x in t.v.items():
        o = A.element_order(a)
        if x < 0 and not skip_two_adic and p % 4 == 3:
            out = A.add(out, a)
        for q in _prime_factors(abs(x)):
            if q == p:
                continue
            depth = 0
            while o % q ** (depth + 1) == 0:
                depth += 1
            if q == 2:
                if skip_two_adic:
                    continue
                k = norm.two_adic_log(p, depth + 2)
            elif o == 2 and depth == 0:
                # order-2 character: only the parity of the index matters,
                # and the least primitive root is a non-residue
                k = 0 if _jacobi_is_square(p, q) else 1
            else:
                k = norm.dlog(q, p, depth)
            out = A.add(out, A.smul(k, a))
    return out


@lru_cache(maxsize=1 << 20)
def frobenius_image(t: ExtensionTuple, p: int, norm: CharacterNormalization) -> Element:
    """phi(Frob_p) for p unramified in t."""
    prof = t.ramification_profile()
    if p in prof or (p == 2 and t.ramified_at_two()):
        raise ValueError(f"prime {p} is ramified; use decomposition_group")
    return _frob_sum(t, p, norm)


def decomposition_group(t: ExtensionTuple, p, norm: CharacterNormalization) -> Subgroup:
    return local_data(t, p, norm).decomposition(t.group)


@lru_cache(maxsize=1 << 20)
def local_data(t: ExtensionTuple, p, norm: CharacterNormalization) -> LocalData:
    """Inertia generators and a Frobenius lift at a ramified place."""
    A = t.group
    prof = t.ramification_profile()
    if p == "oo":
        if "oo" not in prof:
            raise ValueError("infinite place unramified")
        return LocalData("oo", (prof["oo"],), A.zero)
    if p == 2:
        gens = []
        a2, asgn = t.two_index(), t.sign_index()
        if a2 is not None:
            gens.append(a2)
        if asgn is not None and asgn not in gens:
            gens.append(asgn)
        if not gens:
            raise ValueError("2 is unramified")
        b = _frob_sum(t, 2, norm, skip_two_adic=True)
        return LocalData(2, tuple(gens), b)
    if p not in prof:
        raise ValueError(f"prime {p} is unramified")
    b = _frob_sum(t, p, norm)
    return LocalData(p, (prof[p],), b)


@dataclass(frozen=True)
class Verdict:
    sha_order: int
    at_order: int
    wa: bool
    hnp: bool
    noncyclic_inertia_at_2: bool = False


@lru_cache(maxsize=1 << 20)
def ramified_places(t: ExtensionTuple) -> tuple:
    places = sorted(p for p in t.ramification_profile() if p != "oo")
    if t.ramified_at_two() and 2 not in places:
        places = [2] + places
    if t.sign_index() is not None:
        places.append("oo")
    return tuple(places)


def verdict(t: ExtensionTuple, norm: CharacterNormalization) -> Verdict:
    if not t.is_surjective():
        raise ValueError("verdict requires a surjective tuple")
    return _verdict_any(t, norm)


def _verdict_any(t: ExtensionTuple, norm: CharacterNormalization) -> Verdict:
    A = t.group
    locs = [local_data(t, p, norm) for p in ramified_places(t)]
    groups = [ld.decomposition(A) for ld in locs]
    sha = sha_dual_dimension(A, groups)
    wedge = A.wedge_dual_order()
    at = wedge // sha
    flag = any(ld.noncyclic_inertia for ld in locs)
    return Verdict(sha, at, at == 1, sha == 1, flag)


def classify_range(A: FiniteAbelianGroup, X: int, norm: CharacterNormalization,
                   records: list | None = None) -> dict:
    """Fold verdicts over the surjective enumeration; counts are in fields
    (epimorphism tallies divided by |Aut A|)."""
    from .groups import alpha, alpha_total, aut_order
    from .tuples import EnumerationFilter, discriminant, enumerate_tuples

    naut = aut_order(A)
    epis = wa_epis = hnp_fail_epis = flagged = 0
    hist: dict[int, int] = {}
    for t in enumerate_tuples(A, X, EnumerationFilter(surjective=True)):
        v = verdict(t, norm)
        d = discriminant(t).total
        epis += 1
        if v.wa:
            wa_epis += 1
        if not v.hnp:
            hnp_fail_epis += 1
        if v.noncyclic_inertia_at_2:
            flagged += 1
        decade = len(str(d)) - 1
        hist[decade] = hist.get(decade, 0) + 1
        if records is not None:
            records.append((d, t.serialize(), v))
    for label, n in (("total", epis), ("wa", wa_epis), ("hnp_fail", hnp_fail_epis)):
        if n % naut:
            raise RuntimeError(f"{label} epimorphism count {n} not divisible by |Aut|={naut}")
    return {
        "group": A.describe(),
        "X": int(X),
        "alpha": str(alpha(A)),
        "alpha_total": str(alpha_total(A)),
        "fields": epis // naut,
        "wa_fields": wa_epis // naut,
        "hnp_fail_fields": hnp_fail_epis // naut,
        "flagged_noncyclic_inertia_at_2_epis": flagged,
        "histogram_by_disc_decade": {str(k): v for k, v in sorted(hist.items())},
        "normalization": norm.version,
    }

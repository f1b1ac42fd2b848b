"""
The tuple space parametrizing homomorphisms G_Q -> A.

A tuple assigns to each nonzero a in A a signed squarefree integer v_a
(absent = 1).  Places divide entries: a prime p divides v_a in the usual
sense, the infinite place divides v_a iff v_a < 0.  Constraints:

  * each v_a squarefree, pairwise coprime as places (so at most one
    negative entry, no shared prime);
  * p | v_a  =>  p = 1 mod ord(a)/p^{v_p(ord a)};
  * v_a > 0 whenever ord(a) > 2.

Discriminants are computed uniformly by conductor-discriminant over the
dual group; enumeration is a pruned depth-first search over ascending
primes with a sign/2-adic configuration stage up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod

from functools import lru_cache

from sympy import factorint, integer_nthroot, primerange

from .groups import Element, FiniteAbelianGroup


@lru_cache(maxsize=None)
def prime_factors(n: int) -> tuple:
    """Distinct prime factors of n, cached (entries repeat across tuples)."""
    return tuple(factorint(n))


# -- weight -----------------------------------------------------------------

@dataclass(frozen=True)
class WeightFunction:
    """Strongly multiplicative Delta with Delta(p)=p except Delta(ell)=ell^2;
    also carries the 2-adic congruence modulus d(ell)."""

    ell: int

    def weight(self, v: int) -> int:
        return prod((self.ell if p == self.ell else 1) * p for p in factorint(abs(v)))

    @property
    def congruence_modulus(self) -> int:
        return 16 if self.ell == 2 else 1


# -- tuples -----------------------------------------------------------------

class TupleSpaceError(ValueError):
    pass


def admissible_prime(A: FiniteAbelianGroup, a: Element, p: int) -> bool:
    """p may divide v_a: p = 1 mod ord(a) stripped of its p-part."""
    m = A.element_order(a)
    while m % p == 0:
        m //= p
    return m == 1 or p % m == 1


class ExtensionTuple:
    """group plus a map nonzero element -> signed squarefree entry != 1."""

    def __init__(self, group: FiniteAbelianGroup, v: dict, check: bool = True):
        self.group = group
        self.v = {a: int(x) for a, x in v.items() if int(x) != 1}
        if check:
            self.validate()

    def validate(self):
        A = self.group
        seen_primes: set[int] = set()
        negatives = 0
        for a, x in self.v.items():
            if not A.contains(a) or a == A.zero:
                raise TupleSpaceError(f"bad index {a}")
            if x == 0:
                raise TupleSpaceError("entries must be nonzero")
            fac = factorint(abs(x))
            if any(e > 1 for e in fac.values()):
                raise TupleSpaceError(f"entry {x} not squarefree")
            if x < 0:
                negatives += 1
                if A.element_order(a) > 2:
                    raise TupleSpaceError(f"negative entry at index of order > 2")
            for p in fac:
                if p in seen_primes:
                    raise TupleSpaceError(f"prime {p} divides two entries")
                if not admissible_prime(A, a, p):
                    raise TupleSpaceError(f"prime {p} not admissible for index {a}")
            seen_primes |= set(fac)
        if negatives > 1:
            raise TupleSpaceError("two negative entries are not coprime")

    # -- structure ----------------------------------------------------------

    def entry(self, a: Element) -> int:
        return self.v.get(a, 1)

    def support(self):
        return sorted(self.v)

    def ramification_profile(self) -> dict:
        """place (prime or the string 'oo') -> inertia-generating index."""
        if not hasattr(self, "_prof"):
            prof = {}
            for a, x in self.v.items():
                if x < 0:
                    prof["oo"] = a
                for p in prime_factors(abs(x)):
                    prof[p] = a
            self._prof = prof
        return self._prof

    def sign_index(self):
        for a, x in self.v.items():
            if x < 0:
                return a
        return None

    def two_index(self):
        for a, x in self.v.items():
            if x % 2 == 0:
                return a
        return None

    def is_surjective(self) -> bool:
        return len(self.group.span(self.support())) == self.group.order

    def ramified_at_two(self) -> bool:
        return self.two_index() is not None or self.sign_index() is not None

    # -- canonical form ------------------------------------------------------

    def key(self):
        return tuple(sorted(self.v.items()))

    def serialize(self) -> str:
        return ";".join(
            f"{'.'.join(str(c) for c in a)}:{x}" for a, x in sorted(self.v.items())
        )

    @classmethod
    def deserialize(cls, group: FiniteAbelianGroup, s: str) -> "ExtensionTuple":
        v = {}
        if s:
            for part in s.split(";"):
                coords, x = part.split(":")
                v[tuple(int(c) for c in coords.split("."))] = int(x)
        return cls(group, v)

    def __eq__(self, other):
        return isinstance(other, ExtensionTuple) and self.group == other.group and self.v == other.v

    def __hash__(self):
        if not hasattr(self, "_h"):
            self._h = hash((self.group, self.key()))
        return self._h

    def __repr__(self):
        return f"ExtensionTuple({self.group.describe()}, {{{self.serialize()}}})"


def is_surjective(t: ExtensionTuple) -> bool:
    return t.is_surjective()


def weighted_size(t: ExtensionTuple) -> int:
    w = WeightFunction(t.group.ell)
    return prod(w.weight(x) for x in t.v.values()) if t.v else 1


# -- discriminant -----------------------------------------------------------

@dataclass(frozen=True)
class DiscriminantValue:
    exponents: tuple  # sorted tuple of (prime, exponent), exponents > 0
    total: int

    def exponent(self, p: int) -> int:
        return dict(self.exponents).get(p, 0)


def _char_value_order(A: FiniteAbelianGroup, b: Element, a: Element) -> int:
    """Order of chi_b(a) in Q/Z where chi_b(a) = sum b_i a_i / d_i."""
    e = A.exponent
    num = sum(x * y * (e // d) for x, y, d in zip(b, a, A.factors)) % e
    return e // gcd(num, e)


def discriminant(t: ExtensionTuple) -> DiscriminantValue:
    """Conductor-discriminant over the dual group.

    For odd p ramified with inertia index a:
        e_p = sum over chi in the dual of c(ord chi(a)),
        c(1) = 0, c(t) = 1 + v_p(t) for t > 1.
    For p = 2: with a2 the 2-divisible index (if any) and s the sign index,
        per character: m = v_2(ord chi(a2));  e = m + 2 if m >= 1,
        else 2 if chi(s) != 0, else 0.
    """
    A = t.group
    exps: dict[int, int] = {}
    duals = A.elements()

    for a, x in t.v.items():
        for p in prime_factors(abs(x)):
            if p == 2:
                continue
            e = 0
            for b in duals:
                o = _char_value_order(A, b, a)
                if o > 1:
                    e += 1
                    while o % p == 0:
                        e += 1
                        o //= p
            exps[p] = e

    a2 = t.two_index()
    asgn = t.sign_index()
    if a2 is not None or asgn is not None:
        e2 = 0
        for b in duals:
            m = 0
            if a2 is not None:
                o = _char_value_order(A, b, a2)
                while o % 2 == 0:
                    m += 1
                    o //= 2
            if m >= 1:
                e2 += m + 2
            elif asgn is not None and _char_value_order(A, b, asgn) > 1:
                e2 += 2
        if e2:
            exps[2] = e2

    items = tuple(sorted((p, e) for p, e in exps.items() if e > 0))
    return DiscriminantValue(items, prod(p ** e for p, e in items))


def tame_exponent(A: FiniteAbelianGroup, a: Element) -> int:
    """|A| (1 - 1/ord(a)): valuation at tame ramified primes."""
    o = A.element_order(a)
    return A.order - A.order // o


def epis_to_fields(count: int, A: FiniteAbelianGroup) -> int:
    from .groups import aut_order

    n = aut_order(A)
    if count % n:
        raise ValueError(f"epimorphism count {count} not divisible by |Aut| = {n}")
    return count // n


# -- enumeration ------------------------------------------------------------

def _int_nthroot(x: int, n: int) -> int:
    r, _ = integer_nthroot(int(x), n)
    return r


def _odd_primes_upto(bound: int):
    return [p for p in primerange(3, bound + 1)]

@dataclass(frozen=True)
class EnumerationFilter:
    surjective: bool = False
    congruence: tuple = ()     # ((index, residue), ...) for v_a = c_a mod d(ell)
    coprime_to: int = 1        # demand gcd(v_a, M) = 1
    residue_sets: tuple = ()   # ((index, frozenset of allowed p mod M), ...)

    def residue_map(self):
        return dict(self.residue_sets)


def _two_adic_exponent(A: FiniteAbelianGroup, a2, asgn) -> int:
    e2 = 0
    for b in A.elements():
        m = 0
        if a2 is not None:
            o = _char_value_order(A, b, a2)
            while o % 2 == 0:
                m += 1
                o //= 2
        if m >= 1:
            e2 += m + 2
        elif asgn is not None and _char_value_order(A, b, asgn) > 1:
            e2 += 2
    return e2


def _odd_prime_exponent(A: FiniteAbelianGroup, a: Element, p: int) -> int:
    if A.order % p:
        return tame_exponent(A, a)
    e = 0
    for b in A.elements():
        o = _char_value_order(A, b, a)
        if o > 1:
            e += 1
            while o % p == 0:
                e += 1
                o //= p
    return e


def enumeration_branches(A: FiniteAbelianGroup, X: int):
    """Deterministic top-level branches: the sign / 2-adic configurations.

    Each branch is ((a2 or None), (asgn or None), e2).  Branch 0 is the
    all-unramified-at-2 configuration.
    """
    idx = A.nonzero_elements()
    two_ok = [a for a in idx if admissible_prime(A, a, 2)]
    sign_ok = [a for a in idx if A.element_order(a) <= 2]
    branches = []
    for a2 in [None] + two_ok:
        for asgn in [None] + sign_ok:
            e2 = _two_adic_exponent(A, a2, asgn) if (a2 or asgn) else 0
            if 2 ** e2 <= X:
                branches.append((a2, asgn, e2))
    return branches


def enumerate_tuples(A: FiniteAbelianGroup, X: int, filt: EnumerationFilter | None = None,
                     branch=None, strategy: str = "dfs", measure: str = "discriminant"):
    """Yield every tuple with discriminant <= X exactly once.

    strategy "dfs": ascending odd primes, each assigned to one index or
    skipped, pruned on the minimal remaining exponent.  strategy "radical":
    independent re-enumeration by squarefree radical then assignment.
    branch: restrict to one top-level sign/2-adic configuration.
    measure "weight": bound the multiplicative weight prod Delta(v_a)
    instead of the discriminant.
    """
    filt = filt or EnumerationFilter()
    if X < 1:
        return
    if measure not in ("discriminant", "weight"):
        raise TupleSpaceError(f"unknown measure {measure!r}")
    if strategy == "radical":
        if measure != "discriminant":
            raise TupleSpaceError("radical strategy bounds discriminants only")
        yield from _enumerate_radical(A, X, filt, branch)
        return
    idx = A.nonzero_elements()
    by_weight = measure == "weight"
    emin = 1 if by_weight else min(tame_exponent(A, a) for a in idx)
    exp_cache: dict[tuple, int] = {}

    def odd_exp(a, p):
        k = (a, p) if A.order % p == 0 else (A.element_order(a), -1)
        if k not in exp_cache:
            exp_cache[k] = _odd_prime_exponent(A, a, p)
        return exp_cache[k]

    def cost(a, p):
        if by_weight:
            return p * A.ell if p == A.ell else p
        return p ** odd_exp(a, p)

    M = filt.coprime_to
    residue_map = filt.residue_map()

    def allowed(a, p):
        if not admissible_prime(A, a, p):
            return False
        if M > 1 and gcd(p, M) > 1:
            return False
        if a in residue_map and p % M not in residue_map[a]:
            return False
        return True

    branches = enumeration_branches(A, 1 << 62 if by_weight else X)
    if branch is not None:
        branches = [b for b in branches if b[:2] == tuple(branch)]

    primes = _odd_primes_upto(_int_nthroot(X, emin))

    def rec(start, disc, assign):
        t = ExtensionTuple(A, assign, check=False)
        if _passes(t, filt):
            yield t
        for j in range(start, len(primes)):
            p = primes[j]
            if disc * p ** emin > X:
                break
            for a in idx:
                if allowed(a, p):
                    c = cost(a, p)
                    if disc * c <= X:
                        assign[a] = assign.get(a, 1) * p
                        yield from rec(j + 1, disc * c, assign)
                        assign[a] //= p
                        if assign[a] == 1:
                            del assign[a]

    for a2, asgn, e2 in branches:
        if M > 1 and a2 is not None and M % 2 == 0:
            continue
        base = {}
        base_cost = (4 if a2 is not None else 1) if by_weight else 2 ** e2
        if by_weight and base_cost > X:
            continue
        if a2 is not None:
            base[a2] = 2
        if asgn is not None:
            base[asgn] = base.get(asgn, 1) * -1
        yield from rec(0, base_cost, dict(base))


def _passes(t: ExtensionTuple, filt: EnumerationFilter) -> bool:
    if filt.surjective and not t.is_surjective():
        return False
    if filt.congruence:
        w = WeightFunction(t.group.ell)
        d = w.congruence_modulus
        for a, c in filt.congruence:
            if t.entry(a) % d != c % d:
                return False
    return True


def _enumerate_radical(A: FiniteAbelianGroup, X: int, filt: EnumerationFilter,
                       branch=None):
    """Independent strategy: all admissible squarefree odd radicals
    r <= X^(1/emin), then every assignment of their primes to indices,
    crossed with the sign/2-adic configurations."""
    idx = A.nonzero_elements()
    emin = min(tame_exponent(A, a) for a in idx)
    rmax = _int_nthroot(X, emin)
    M = filt.coprime_to
    residue_map = filt.residue_map()

    def allowed(a, p):
        if not admissible_prime(A, a, p):
            return False
        if M > 1 and gcd(p, M) > 1:
            return False
        if a in residue_map and p % M not in residue_map[a]:
            return False
        return True

    branches = enumeration_branches(A, X)
    if branch is not None:
        branches = [b for b in branches if b[:2] == tuple(branch)]
    configs = []
    for a2, asgn, e2 in branches:
        if M > 1 and a2 is not None and M % 2 == 0:
            continue
        base = {}
        if a2 is not None:
            base[a2] = 2
        if asgn is not None:
            base[asgn] = base.get(asgn, 1) * -1
        configs.append((base, 2 ** e2))

    for r in range(1, rmax + 1):
        if r % 2 == 0:
            continue
        fac = factorint(r)
        if any(e > 1 for e in fac.values()):
            continue
        primes = sorted(fac)
        if r > 1 and not all(any(allowed(a, p) for a in idx) for p in primes):
            continue
        for base, disc0 in configs:
            stack = [(0, disc0, dict(base))]
            while stack:
                i, disc, assign = stack.pop()
                if i == len(primes):
                    t = ExtensionTuple(A, assign, check=False)
                    if _passes(t, filt):
                        yield t
                    continue
                p = primes[i]
                for a in idx:
                    if allowed(a, p):
                        e = _odd_prime_exponent(A, a, p)
                        if disc * p ** e <= X:
                            nxt = dict(assign)
                            nxt[a] = nxt.get(a, 1) * p
                            stack.append((i + 1, disc * p ** e, nxt))

"""
Congruence-function formalism over elementary abelian A = F_l^n.

A congruence function prescribes, for each ramified prime (through its
residue mod M and its inertia line), a coset condition on the Frobenius
lift, and for each prime dividing M a list of allowed unramified Frobenius
values.  Two independent routes decide whether a tuple satisfies it:
direct set membership (f_correct) and an exact character-sum detector over
Z[zeta_l] (indicator_via_characters).  The module also computes the
log-exponent alpha attached to such a family and exhaustively verifies the
two combinatorial pairing lemmas that drive the character-sum bounds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, lcm

from sympy import factorint, totient

from .frobenius import CharacterNormalization, frobenius_image, local_data, ramified_places
from .groups import Element, FiniteAbelianGroup
from .tuples import ExtensionTuple


class CongruenceError(ValueError):
    pass


def _require_elementary(A: FiniteAbelianGroup) -> int:
    ell = A.ell
    if any(d != ell for d in A.factors):
        raise CongruenceError("group must be elementary abelian F_l^n")
    return ell


def dot(A: FiniteAbelianGroup, x: Element, y: Element) -> int:
    """Standard pairing on F_l^n with values in Z/l."""
    return sum(a * b for a, b in zip(x, y)) % A.ell


@lru_cache(maxsize=None)
def line_rep(A: FiniteAbelianGroup, a: Element) -> Element:
    """Canonical generator of the line <a>: the smallest nonzero multiple."""
    if a == A.zero:
        raise CongruenceError("zero spans no line")
    return min(A.smul(k, a) for k in range(1, A.ell))


def perp(A: FiniteAbelianGroup, S) -> list:
    """{x : <x, s> = 0 for all s in S}."""
    S = list(S)
    return [x for x in A.elements() if all(dot(A, x, s) == 0 for s in S)]


def _is_subgroup(A: FiniteAbelianGroup, S: frozenset) -> bool:
    return A.zero in S and all(A.add(x, y) in S for x in S for y in S)


def _unit_residues(M: int):
    return frozenset(r for r in range(M) if gcd(r, M) == 1)


@dataclass(frozen=True)
class CongruenceFunction:
    """Data (M, B, f, g): B a subgroup of A = F_l^n; the f-condition at a
    ramified prime of residue r and inertia line <a> with a not in B is
    membership in the coset eps[(line, r)] + B + <a>; for a in B the
    condition is vacuous.  g maps each prime p | M to the allowed
    unramified Frobenius values.  eps must be constant (modulo B + <a>)
    on cosets of the declared unit subgroup G of (Z/M)^x.
    """

    group: FiniteAbelianGroup
    M: int = 1
    B: frozenset = frozenset()
    eps: dict = field(default_factory=dict)      # (line_rep, residue) -> Element
    g: dict = field(default_factory=dict)        # prime p | M -> frozenset of Elements
    G: frozenset | None = None                   # subgroup of (Z/M)^x; None = full

    def __post_init__(self):
        A = self.group
        _require_elementary(A)
        if self.M < 1:
            raise CongruenceError("modulus must be >= 1")
        B = frozenset(self.B) or frozenset({A.zero})
        object.__setattr__(self, "B", B)
        if not _is_subgroup(A, B):
            raise CongruenceError("B must be a subgroup")
        G = self.G if self.G is not None else _unit_residues(self.M)
        G = frozenset(r % self.M for r in G)
        object.__setattr__(self, "G", G)
        units = _unit_residues(self.M)
        if not G <= units or 1 % self.M not in G:
            raise CongruenceError("G must be a subgroup of the units mod M")
        for r, s in product(G, G):
            if r * s % self.M not in G:
                raise CongruenceError("G must be a subgroup of the units mod M")
        object.__setattr__(self, "M_primes", tuple(factorint(self.M)))
        for p in self.M_primes:
            if p not in self.g or not self.g[p]:
                raise CongruenceError(f"g({p}) must be a nonempty subset of A")
        for (a, r), e in self.eps.items():
            if not A.contains(e) or not A.contains(a) or a == A.zero:
                raise CongruenceError("bad eps entry")
            if r % self.M not in units:
                raise CongruenceError("eps residues must be units mod M")
        # G-coset constancy of eps, modulo B + <a>
        for (a, r), e in self.eps.items():
            Ba = self.block(a)
            for u in G:
                e2 = self.epsilon(a, r * u % self.M)
                if A.add(e2, A.neg(e)) not in Ba:
                    raise CongruenceError("eps not constant on G-cosets")

    def _line_tables(self) -> dict:
        if not hasattr(self, "_blocks"):
            object.__setattr__(self, "_blocks", {})
            object.__setattr__(self, "_perps", {})
            object.__setattr__(self, "_g_ok", {})
            object.__setattr__(self, "_coset_ok", {})
        return self._blocks

    def block_by_line(self, key: Element) -> frozenset:
        """B + <a> as a set, keyed by the canonical line generator."""
        blocks = self._line_tables()
        if key not in blocks:
            out = set()
            for b in self.B:
                for k in range(self.group.ell):
                    out.add(self.group.add(b, self.group.smul(k, key)))
            blocks[key] = frozenset(out)
            self._perps[key] = tuple(perp(self.group, out))
        return blocks[key]

    def block(self, a: Element) -> frozenset:
        return self.block_by_line(line_rep(self.group, a))

    def block_perp(self, a: Element) -> tuple:
        self.block(a)
        return self._perps[line_rep(self.group, a)]

    def epsilon(self, a: Element, residue: int) -> Element:
        return self.eps.get((line_rep(self.group, a), residue % self.M), self.group.zero)


# -- route one: direct membership -------------------------------------------

@lru_cache(maxsize=1 << 20)
def _odd_ramified(t: ExtensionTuple) -> tuple:
    """(odd finite ramified primes, full finite ramified set) for t."""
    ram = tuple(p for p in ramified_places(t) if p not in ("oo", 2))
    ramset = frozenset(ram) | ({2} if t.ramified_at_two() else frozenset())
    return ram, ramset


def f_correct(t: ExtensionTuple, cf: CongruenceFunction,
              norm: CharacterNormalization) -> bool:
    """Whether t has the prescribed Frobenius data: every ramified prime
    coprime to 2M satisfies the coset condition, and every p | M (except
    p = 2 when l = 2) is unramified with Frobenius in g(p)."""
    A = t.group
    if A != cf.group:
        raise CongruenceError("tuple and congruence function disagree on A")
    ell = A.ell                       # cf construction validated elementarity
    ram, ramset = _odd_ramified(t)
    for p in cf.M_primes:
        if p == 2 and ell == 2:
            continue
        if p in ramset:
            return False
        if frobenius_image(t, p, norm) not in cf.g[p]:
            return False
    B, M, eps, zero = cf.B, cf.M, cf.eps, A.zero
    for p in ram:
        if M % p == 0 or (ell == 2 and p == 2):
            continue
        ld = local_data(t, p, norm)
        a = ld.inertia_gens[0]
        if a in B:
            continue
        L = line_rep(A, a)
        shift = A.add(ld.frobenius, A.neg(eps.get((L, p % M), zero)))
        if shift not in cf.block_by_line(L):
            return False
    return True


# -- route two: exact character sums ----------------------------------------

def _cyclo_counts_equal(counts, value: int) -> bool:
    """Whether sum_j counts[j] zeta^j == value in Z[zeta_l], exactly:
    the difference must be an integer multiple of 1 + zeta + ... + zeta^{l-1}."""
    shifted = [c - (value if j == 0 else 0) for j, c in enumerate(counts)]
    return len(set(shifted)) == 1


def indicator_via_characters(t: ExtensionTuple, cf: CongruenceFunction,
                             norm: CharacterNormalization) -> bool:
    """Same predicate as f_correct, via orthogonality: each local condition
    becomes an averaged character sum over Z[zeta_l] that is 1 when the
    condition holds and 0 otherwise; the product must be 1.  Each sum
    depends only on the inertia line and the shifted Frobenius class (not
    on the tuple), so its value is memoized per congruence function."""
    A = t.group
    if A != cf.group:
        raise CongruenceError("tuple and congruence function disagree on A")
    ell = A.ell                       # cf construction validated elementarity
    ram, ramset = _odd_ramified(t)
    cf._line_tables()
    for p in cf.M_primes:
        if p == 2 and ell == 2:
            continue
        if p in ramset:
            return False
        img = frobenius_image(t, p, norm)
        gok = cf._g_ok.setdefault(p, {})
        ok = gok.get(img)
        if ok is None:
            counts = [0] * ell
            for alpha in cf.g[p]:
                d = A.add(img, A.neg(alpha))
                for x in A.elements():
                    counts[dot(A, x, d)] += 1
            ok = gok[img] = _cyclo_counts_equal(counts, A.order)
        if not ok:
            return False
    B, M, eps, zero = cf.B, cf.M, cf.eps, A.zero
    for p in ram:
        if M % p == 0 or (ell == 2 and p == 2):
            continue
        ld = local_data(t, p, norm)
        a = ld.inertia_gens[0]
        if a in B:
            continue
        L = line_rep(A, a)
        d = A.add(ld.frobenius, A.neg(eps.get((L, p % M), zero)))
        key = (L, d)
        ok = cf._coset_ok.get(key)
        if ok is None:
            P = cf.block_perp(a)
            counts = [0] * ell
            for x in P:
                counts[dot(A, x, d)] += 1
            ok = cf._coset_ok[key] = _cyclo_counts_equal(counts, len(P))
        if not ok:
            return False
    return True


# -- the general log-exponent ------------------------------------------------

@dataclass(frozen=True)
class LiftSet:
    """{x in (Z/lcm(M,l))^x : x = 1 mod l, x mod M in H}."""

    M: int
    ell: int
    H: frozenset

    @property
    def modulus(self) -> int:
        return lcm(self.M, self.ell)

    def elements(self):
        L = self.modulus
        return [x for x in range(L)
                if gcd(x, L) == 1 and x % self.ell == 1 % self.ell
                and x % self.M in self.H]

    def __len__(self):
        return len(self.elements())


def alpha_general(A: FiniteAbelianGroup, B, M: int, H: dict) -> Fraction:
    """alpha = sum_{a in B-0} |Lift(H_a)|/phi(lcm(M,l))
             + (|B|/l^{n-1}) sum_{a not in B} |Lift(H_a)|/phi(lcm(M,l)),
    exact; the H_a for a outside B must all have the same size."""
    ell = _require_elementary(A)
    B = frozenset(B) or frozenset({A.zero})
    if not _is_subgroup(A, B):
        raise CongruenceError("B must be a subgroup")
    phi = int(totient(lcm(M, ell)))
    sizes = set()
    total = Fraction(0)
    outside = Fraction(0)
    ln1 = A.order // ell
    for a in A.nonzero_elements():
        Ha = frozenset(r % M for r in H[a])
        cnt = len(LiftSet(M, ell, Ha))
        if a in B:
            total += Fraction(cnt, phi)
        else:
            sizes.add(len(Ha))
            outside += Fraction(len(B) * cnt, ln1 * phi)
    if len(sizes) > 1:
        raise CongruenceError("H_a sizes must agree outside B")
    return total + outside


# -- the pairing block lemmas ------------------------------------------------

def pair_index_set(A: FiniteAbelianGroup, B: frozenset) -> list:
    """I = {(a, b) : a not in B, b orthogonal to B + <a>}."""
    out = []
    for a in A.elements():
        if a in B:
            continue
        Ba = set()
        for x in B:
            for k in range(A.ell):
                Ba.add(A.add(x, A.smul(k, a)))
        out.extend((a, b) for b in perp(A, Ba))
    return out


def _compatible(A: FiniteAbelianGroup, u, v) -> bool:
    a1, b1 = u
    a2, b2 = v
    if A.ell == 2:
        return dot(A, a1, b2) == dot(A, a2, b1)
    return dot(A, a1, b2) == 0 and dot(A, a2, b1) == 0


def _maximal_cliques(vertices, adj):
    cliques = []

    def bk(R, P, X):
        if not P and not X:
            cliques.append(frozenset(R))
            return
        pivot = max(P | X, key=lambda u: len(adj[u] & P))
        for v in list(P - adj[pivot]):
            bk(R | {v}, P & adj[v], X & adj[v])
            P.discard(v)
            X.add(v)

    bk(set(), set(vertices), set())
    return cliques


def _all_cliques(vertices, adj):
    vs = list(vertices)

    def rec(i, R):
        yield frozenset(R)
        for j in range(i, len(vs)):
            v = vs[j]
            if all(v in adj[u] for u in R):
                R.append(v)
                yield from rec(j + 1, R)
                R.pop()

    yield from rec(0, [])


def verify_block_lemma(ell: int, n: int, B) -> dict:
    """Exhaustively check the pairing lemma over F_l^n for the subgroup B:
    every compatible subset of the pair index set of size >= l^n - |B| is
    the zero-second-coordinate set (l odd), or has exactly that size with
    pairwise distinct first coordinates (l = 2: the graph of an alternating
    assignment).  Returns a JSON-ready report; counterexamples must be empty.
    """
    if ell ** n > 27:
        raise CongruenceError("l^n too large to enumerate (bound 27)")
    t0 = time.time()
    A = FiniteAbelianGroup([ell] * n)
    B = frozenset(B) or frozenset({A.zero})
    if not _is_subgroup(A, B):
        raise CongruenceError("B must be a subgroup")
    pairs = pair_index_set(A, B)
    adj = {u: frozenset(v for v in pairs if v != u and _compatible(A, u, v))
           for u in pairs}
    threshold = ell ** n - len(B)
    expected_zero = frozenset((a, A.zero) for a in A.elements() if a not in B)
    if len(pairs) <= 20:
        candidates = [X for X in _all_cliques(pairs, adj) if len(X) >= threshold]
    else:
        candidates = [X for X in _maximal_cliques(pairs, adj) if len(X) >= threshold]
    bad = []
    for X in candidates:
        if ell == 2:
            ok = len(X) == threshold and len({a for a, _ in X}) == threshold
        else:
            ok = X == expected_zero
        if not ok:
            bad.append(sorted(X))
    return {
        "lemma": "alternating-graph" if ell == 2 else "zero-column",
        "ell": ell,
        "n": n,
        "B": sorted(B),
        "sets_checked": len(candidates),
        "counterexamples": bad,
        "elapsed": round(time.time() - t0, 3),
    }


def all_subgroups(A: FiniteAbelianGroup) -> list:
    """All subgroups of A as frozensets (A is tiny here)."""
    found = {frozenset({A.zero})}
    frontier = [frozenset({A.zero})]
    while frontier:
        nxt = []
        for S in frontier:
            for a in A.nonzero_elements():
                if a not in S:
                    T = A.span(list(S) + [a]).elements
                    if T not in found:
                        found.add(T)
                        nxt.append(T)
        frontier = nxt
    return sorted(found, key=lambda S: (len(S), sorted(S)))

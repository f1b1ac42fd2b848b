"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import random

import pytest

from normtorus.congruence import CongruenceFunction, line_rep
from normtorus.frobenius import CharacterNormalization
from normtorus.groups import FiniteAbelianGroup


@pytest.fixture(scope="session")
def norm() -> CharacterNormalization:
    return CharacterNormalization()


# one line per acceptance criterion, echoed after the terminal summary so
# they stay visible even though pytest captures stdout of passing tests
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


def congruence_battery(A: FiniteAbelianGroup, aux_prime: int, seed: int = 7):
    """Six congruence functions over A = F_l^n: degenerate (B = A), plain
    coset conditions (B = 0 and B = a line), and three modulus-M cases with
    twisted cosets (random eps pinned per (line, residue), a full-g and a
    half-g variant, and one with eps constant on the full unit group)."""
    rng = random.Random(seed)
    ell = A.ell
    els = A.elements()
    lines = sorted({line_rep(A, a) for a in A.nonzero_elements()})
    full = frozenset(els)
    zero = frozenset({A.zero})
    some_line = frozenset(A.smul(k, lines[0]) for k in range(ell))
    M = aux_prime
    units = list(range(1, M))

    def rand_eps(per_residue: bool):
        eps = {}
        for L in lines:
            if per_residue:
                for r in units:
                    eps[(L, r)] = els[rng.randrange(len(els))]
            else:
                e = els[rng.randrange(len(els))]
                for r in units:
                    eps[(L, r)] = e
        return eps

    g_half = {M: frozenset(els[: max(1, len(els) // 2)])}
    g_full = {M: full}
    return [
        CongruenceFunction(A, B=full),
        CongruenceFunction(A, B=zero),
        CongruenceFunction(A, B=some_line),
        CongruenceFunction(A, M=M, B=zero, eps=rand_eps(True), g=g_half,
                           G=frozenset({1})),
        CongruenceFunction(A, M=M, B=some_line, eps=rand_eps(True), g=g_full,
                           G=frozenset({1})),
        CongruenceFunction(A, M=M, B=zero, eps=rand_eps(False), g=g_half, G=None),
    ]


def abelian_group_types(max_order: int):
    """Every finite abelian group of order <= max_order, as factor lists of
    prime powers (one group per isomorphism class)."""
    from sympy import factorint
    from sympy.utilities.iterables import partitions

    out = []
    for size in range(2, max_order + 1):
        fac = factorint(size)
        per_prime = []
        for p, e in fac.items():
            parts = []
            for part in partitions(e):
                exps = [k for k, mult in part.items() for _ in range(mult)]
                parts.append([p ** k for k in sorted(exps)])
            per_prime.append(parts)
        combos = [[]]
        for parts in per_prime:
            combos = [c + choice for c in combos for choice in parts]
        out.extend(combos)
    return out

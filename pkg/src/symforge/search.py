"""Seeded search for certified instances.

Iteration i of a search with seed s draws everything from
``random.Random(f"{s}:{i}")``, so any single candidate can be regenerated
without replaying the loop before it.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .genericity import full_genericity
from .symmetroid import generate_candidate, project_from_node, split_discriminant
from .threefold import Instance, assemble_instance, delta_from_coeffs, sample_delta

log = logging.getLogger(__name__)

MAX_ITER = 10000


@dataclass
class SearchStats:
    seed: int
    bound: int
    require_d: int | None = None
    good_primes: tuple = ()
    iterations: int = 0
    found: bool = False
    accepted_iteration: int | None = None
    rejections: Counter = field(default_factory=Counter)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "bound": self.bound,
            "require_d": self.require_d,
            "good_primes": list(self.good_primes),
            "iterations": self.iterations,
            "found": self.found,
            "accepted_iteration": self.accepted_iteration,
            "rejections": dict(sorted(self.rejections.items())),
        }


def candidate(seed: int, i: int, bound: int):
    """The matrix and raw delta coefficients tried at iteration i."""
    rng = random.Random(f"{seed}:{i}")
    matrix = generate_candidate(rng.random(), bound)
    return matrix, sample_delta(rng, bound)


def try_candidate(seed: int, i: int, bound: int, require_d=None, good_primes=()):
    """Run one iteration; returns (instance or None, rejection reason or None)."""
    matrix, delta_raw = candidate(seed, i, bound)
    try:
        ps = project_from_node(matrix)
    except ValueError as exc:
        return None, f"projection: {exc}"
    if require_d is not None and ps.d != require_d:
        return None, "d mismatch"
    split = split_discriminant(ps)
    delta = delta_from_coeffs(delta_raw)
    if delta.is_zero():
        return None, "delta zero"
    inst = assemble_instance(ps, split, delta, matrix, [Fraction(c) for c in delta_raw])
    inst.genericity = full_genericity(inst, stop_early=True)
    problem = inst.genericity.first_problem()
    if problem is not None:
        return None, f"{problem.status}: {problem.condition}"
    for p in good_primes:
        if not inst.is_good(p):
            return None, f"bad prime {p}"
    return inst, None


def search_instance(seed: int, bound: int, require_d=None, max_iter: int = MAX_ITER, good_primes=()):
    """First certified instance of the seeded candidate stream, with statistics.

    Returns (instance or None, SearchStats).
    """
    stats = SearchStats(seed=seed, bound=bound, require_d=require_d, good_primes=tuple(good_primes))
    for i in range(max_iter):
        stats.iterations = i + 1
        inst, reason = try_candidate(seed, i, bound, require_d, good_primes)
        if inst is not None:
            stats.found = True
            stats.accepted_iteration = i
            log.info("iteration %d accepted (d = %d)", i, inst.d)
            return inst, stats
        stats.rejections[reason] += 1
        log.info("iteration %d rejected: %s", i, reason)
    return None, stats


def regenerate(seed: int, i: int, bound: int) -> Instance:
    """Rebuild the instance of a given iteration, fully certified."""
    from .threefold import build_instance

    matrix, delta_raw = candidate(seed, i, bound)
    inst = build_instance(matrix, delta_raw)
    inst.certify()
    return inst

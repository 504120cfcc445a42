"""Deterministic random rational sampling for randomized identity checks.

All draws go through ``random.Random`` seeded explicitly, so every check is
reproducible from its seed.  Values are rationals with numerator and
denominator bounded by 10^4.  Constraint handling is by rejection: a draw
that hits an excluded value, collides with another sampled value, or
vanishes on a supplied polynomial is retried with fresh randomness, up to a
retry cap, after which the caller gets a clear error instead of a silent
loop.
"""

from __future__ import annotations

import random
from typing import Dict, Iterable, List, Optional, Sequence

from .poly import MPoly
from .rat import Rat, as_rat

DEFAULT_BOUND = 10 ** 4
RETRY_CAP = 1000


def random_rational(rng: random.Random, bound: int = DEFAULT_BOUND,
                    nonzero: bool = False) -> "Rat":
    """One rational with |numerator| <= bound and 1 <= denominator <= bound."""
    while True:
        num = rng.randint(-bound, bound)
        if nonzero and num == 0:
            continue
        den = rng.randint(1, bound)
        return as_rat(num) / den


def random_assignment(seed: int,
                      names: Sequence[str],
                      avoid_values: Optional[Dict[str, Iterable]] = None,
                      avoid_polys: Optional[Sequence[MPoly]] = None,
                      distinct: bool = True,
                      base: Optional[Dict[str, "Rat"]] = None,
                      bound: int = DEFAULT_BOUND) -> Dict[str, "Rat"]:
    """Draw rationals for ``names`` subject to avoidance constraints.

    ``avoid_values[name]`` lists rationals the draw for ``name`` must differ
    from.  With ``distinct`` set, all drawn values are pairwise different
    (including any fixed values in ``base``).  ``avoid_polys`` are
    polynomials in the drawn names and/or ``base`` names that must not
    vanish at the combined assignment; a vanishing draw rejects the whole
    tuple.  ``base`` values provide context only and are not returned.
    Raises RuntimeError after ``RETRY_CAP`` failed attempts.
    """
    avoid_values = avoid_values or {}
    avoid_polys = avoid_polys or []
    base = {k: as_rat(v) for k, v in (base or {}).items()}
    rng = random.Random(seed)
    for _ in range(RETRY_CAP):
        assignment: Dict[str, Rat] = {}
        ok = True
        for name in names:
            value = random_rational(rng, bound=bound)
            bad = [as_rat(v) for v in avoid_values.get(name, ())]
            if any(value == b for b in bad):
                ok = False
                break
            if distinct and (any(value == v for v in assignment.values())
                             or any(value == v for v in base.values())):
                ok = False
                break
            assignment[name] = value
        if not ok:
            continue
        full = {**base, **assignment}
        if any(p.eval_rat(full) == 0 for p in avoid_polys):
            continue
        return assignment
    raise RuntimeError(
        f"random_assignment: no admissible draw for {list(names)} "
        f"within {RETRY_CAP} attempts (seed {seed})")


def seed_stream(seed: int, count: int) -> List[int]:
    """Derive ``count`` independent child seeds from one master seed."""
    rng = random.Random(seed)
    return [rng.getrandbits(63) for _ in range(count)]

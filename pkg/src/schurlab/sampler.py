"""Reproducible binomial random subsets [n]_p.

Stream derivation: the pair (seed, trial_index) is fed to
``numpy.random.SeedSequence(seed, spawn_key=(trial_index,))``, whose first
two 64-bit words key a Philox4x64 counter-based generator.  Element i of [n]
is kept iff the i-th double drawn from that stream is below p.  Consequences:

* a trial depends on nothing but (seed, trial_index), so trials can run in
  any order or process;
* for a fixed trial the sets are coupled across p and n: [n]_p is a subset of
  [n']_{p'} whenever n <= n' and p <= p'.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from schurlab.arith import iroot
from schurlab.sets import IntegerSet

SEED_ENV = "SCHURLAB_SEED"
DEFAULT_SEED = 0


@dataclass(frozen=True)
class RandomSetSpec:
    n: int
    p: float | Fraction
    seed: int = DEFAULT_SEED
    trial_index: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned value")
        if self.trial_index < 0:
            raise ValueError("trial_index must be non-negative")


def stream_key(seed: int, trial_index: int) -> tuple[int, int]:
    """The Philox key used for trial ``trial_index`` under ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=(trial_index,))
    k0, k1 = ss.generate_state(2, dtype=np.uint64)
    return int(k0), int(k1)


def trial_generator(seed: int, trial_index: int) -> np.random.Generator:
    key = np.array(stream_key(seed, trial_index), dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_binomial_set(spec: RandomSetSpec) -> IntegerSet:
    n = spec.n
    if spec.p == 0:
        return IntegerSet(n)
    if spec.p == 1:
        return IntegerSet.from_mask(n, np.ones(n, dtype=bool))
    u = trial_generator(spec.seed, spec.trial_index).random(n)
    return IntegerSet.from_mask(n, u < float(spec.p))


def p_from_exponent(n: int, exponent: Fraction | float | str, factor: float = 1.0) -> tuple[float, bool]:
    """Return (min(1, factor * n ** exponent), clamped).

    Rational exponents whose root of n is exact are evaluated exactly, so
    2048 ** (-1/11) is exactly 0.5.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if factor <= 0:
        raise ValueError(f"factor must be positive, got {factor}")
    ex = Fraction(exponent) if not isinstance(exponent, float) else Fraction(str(exponent))
    root = iroot(n, ex.denominator)
    if root**ex.denominator == n:
        value = float(Fraction(root) ** ex.numerator * Fraction(str(factor)))
    else:
        value = factor * math.exp(float(ex) * math.log(n))
    if value > 1:
        return 1.0, True
    return value, False


def resolve_seed(flag: int | None) -> int:
    """Seed precedence: explicit flag, then $SCHURLAB_SEED, then 0."""
    if flag is not None:
        return int(flag)
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        return int(env, 0)
    return DEFAULT_SEED

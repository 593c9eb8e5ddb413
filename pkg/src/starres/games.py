"""Operational-interpretation algebra: the Close-Images XOR identity,
coalition utilities, Harsanyi dividends, and Shapley values.

Robustness inputs are plain reals here; wiring actual robustness values in
is the caller's job, the identities are algebraic in them.
"""

import math

import numpy as np

from .errors import ValidationError

MAX_PLAYERS = 20


def alice_success(L):
    """Single-game success probability (1 + L)/2."""
    if not 0.0 <= L <= 1.0:
        raise ValidationError("distance value must lie in [0, 1]")
    return (1.0 + L) / 2.0


def xor_even_probability(Ls):
    """Probability that the failures across independent games have even parity.

    Equals (1 + prod L_j)/2, which is (1 + G^M)/2 for the geometric mean G;
    for a single game it reduces to alice_success.
    """
    prod = 1.0
    for L in Ls:
        if not 0.0 <= L <= 1.0:
            raise ValidationError("distance values must lie in [0, 1]")
        prod *= L
    return 0.5 * (1.0 + prod)


def simulate_gi_game(Ls, trials, seed, batch_size=1_000_000):
    """Empirical even-parity probability over seeded independent games.

    Uses the counter-based Philox generator with one child key per batch, so
    the result is deterministic for a given seed and independent of the
    batch split order.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    Ls = [float(L) for L in Ls]
    probs = np.array([alice_success(L) for L in Ls])
    even = 0
    done = 0
    batch_index = 0
    while done < trials:
        n = min(batch_size, trials - done)
        rng = np.random.Generator(np.random.Philox(key=[seed, batch_index]))
        draws = rng.random((n, len(Ls))) < probs[None, :]
        failures = (~draws).sum(axis=1)
        even += int((failures % 2 == 0).sum())
        done += n
        batch_index += 1
    return even / trials


def coalition_utility(rs):
    """prod (1 + r_k) - 1, with u(empty) = 0."""
    rs = list(rs)
    for r in rs:
        if r < 0.0:
            raise ValidationError("robustness values must be nonnegative")
    return math.prod(1.0 + r for r in rs) - 1.0


def harsanyi_dividend(rs):
    """Dividend of the full coalition via the subset recursion.

    Memoized over the subset lattice; exponential in the coalition size,
    hence the hard cap of 20 players.
    """
    rs = list(rs)
    n = len(rs)
    if n > MAX_PLAYERS:
        raise ValidationError(f"coalition too large (max {MAX_PLAYERS})")
    if n == 0:
        return 0.0
    for r in rs:
        if r < 0.0:
            raise ValidationError("robustness values must be nonnegative")
    util = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        prod = 1.0
        for k in range(n):
            if mask >> k & 1:
                prod *= 1.0 + rs[k]
        util[mask] = prod - 1.0
    dividend = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        total = 0.0
        sub = (mask - 1) & mask
        while sub:
            total += dividend[sub]
            sub = (sub - 1) & mask
        dividend[mask] = util[mask] - total
    return dividend[(1 << n) - 1]


def shapley_value(rs, i):
    """Player i's share: sum over coalitions containing i of prod(r)/|T|."""
    rs = list(rs)
    n = len(rs)
    if not 0 <= i < n:
        raise ValidationError("player index out of range")
    if n > MAX_PLAYERS:
        raise ValidationError(f"coalition too large (max {MAX_PLAYERS})")
    total = 0.0
    others = [k for k in range(n) if k != i]
    for mask in range(1 << len(others)):
        prod = rs[i]
        size = 1
        for pos, k in enumerate(others):
            if mask >> pos & 1:
                prod *= rs[k]
                size += 1
        total += prod / size
    return total


def theorem2_ratio(rs):
    """Optimal advantage ratio prod (1 + r_k) of the resource coalition."""
    rs = list(rs)
    for r in rs:
        if r < 0.0:
            raise ValidationError("robustness values must be nonnegative")
    return math.prod(1.0 + r for r in rs)

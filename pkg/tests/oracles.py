"""Independent reference implementations the test suite checks against.

Everything here is written the slow, obvious way (plain loops, no shared
code with the package) so that agreement between package and oracle is
meaningful evidence rather than the same algorithm run twice.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def shapley_by_permutations(n_players: int, coalition_value) -> list[float]:
    """Shapley values as the average marginal contribution over every
    ordering of the players.

    `coalition_value(frozenset_of_players) -> float` is called for each
    prefix of each of the n! orderings.
    """
    totals = [0.0] * n_players
    count = 0
    for order in itertools.permutations(range(n_players)):
        members: set[int] = set()
        prev = coalition_value(frozenset(members))
        for player in order:
            members.add(player)
            cur = coalition_value(frozenset(members))
            totals[player] += cur - prev
            prev = cur
        count += 1
    return [t / count for t in totals]


def interventional_coalition_value(predict_row, x, background_rows, group_slots):
    """Builds the coalition value function used by the Shapley oracle.

    For a coalition S, each background row is copied and the slots of every
    group in S are overwritten with the instance's values; the value is the
    plain mean of the per-row predictions.
    """

    def value(coalition: frozenset) -> float:
        total = 0.0
        for row in background_rows:
            mixed = [float(v) for v in row]
            for g in coalition:
                for slot in group_slots[g]:
                    mixed[slot] = float(x[slot])
            total += float(predict_row(np.asarray(mixed, dtype=np.float64)))
        return total / len(background_rows)

    return value


def nearest_by_euclidean(query, candidates, k):
    """Indices of the k candidates closest to the query, ties broken by
    index order, computed with an explicit distance loop and full sort."""
    dists = []
    for i, cand in enumerate(candidates):
        acc = 0.0
        for a, b in zip(query, cand):
            acc += (float(a) - float(b)) ** 2
        dists.append((math.sqrt(acc), i))
    dists.sort()
    return [i for _, i in dists[:k]]


def trailing_mean_loop(dates, units, day, window):
    """Mean of the last `window` observations strictly before `day`,
    or fewer if the history is shorter. None when there is no history."""
    past = [u for d, u in zip(dates, units) if d < day]
    if not past:
        return None
    tail = past[-window:]
    return sum(tail) / len(tail)


def growth_rate_reference(current: float, previous: float) -> float:
    if previous == 0:
        raise ZeroDivisionError("previous volume is zero")
    return (current - previous) / previous


def pearson_reference(xs, ys):
    """Textbook Pearson correlation; 0.0 when either side is constant."""
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return 0.0
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)


def quantile_linear(sorted_vals, q):
    """Linear-interpolation quantile on pre-sorted data (the `numpy`
    default method, restated independently)."""
    n = len(sorted_vals)
    if n == 1:
        return float(sorted_vals[0])
    pos = q * (n - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return float(sorted_vals[lo] * (1 - frac) + sorted_vals[hi] * frac)

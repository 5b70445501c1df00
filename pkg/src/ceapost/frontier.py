"""Efficiency frontier over per-arm mean effectiveness and mean cost.

Arms are sorted by mean effectiveness; strictly dominated arms (another arm
at least as effective and at least as cheap, strictly better in one) drop
first, then extended-dominated arms fall to the increasing-ICER sweep: an
arm is removed while the incremental ratio to reach it exceeds the ratio of
the step that follows it. The surviving chain has strictly increasing
incremental ratios.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class FrontierResult:
    frontier: tuple[int, ...]            # arm indices, increasing effectiveness
    dominated: tuple[int, ...]
    extended_dominated: tuple[int, ...]
    icers: tuple[float, ...]             # ratio between consecutive frontier arms


def efficiency_frontier(mean_e: Sequence[float], mean_c: Sequence[float]) -> FrontierResult:
    e = np.asarray(mean_e, dtype=float)
    c = np.asarray(mean_c, dtype=float)
    n = e.size
    order = sorted(range(n), key=lambda i: (e[i], c[i], i))

    dominated = set()
    for i in range(n):
        for j in range(n):
            if j == i or j in dominated:
                continue
            if e[j] >= e[i] and c[j] <= c[i] and (e[j] > e[i] or c[j] < c[i]):
                dominated.add(i)
                break
        else:
            # exact duplicates: keep the lowest index
            for j in range(i):
                if j not in dominated and e[j] == e[i] and c[j] == c[i]:
                    dominated.add(i)
                    break

    chain = [i for i in order if i not in dominated]
    extended = []
    while len(chain) >= 3:
        icers = [
            (c[b] - c[a]) / (e[b] - e[a]) for a, b in zip(chain, chain[1:])
        ]
        for pos in range(len(icers) - 1):
            if icers[pos] >= icers[pos + 1]:
                extended.append(chain.pop(pos + 1))
                break
        else:
            break

    icers = tuple(
        float((c[b] - c[a]) / (e[b] - e[a])) for a, b in zip(chain, chain[1:])
    )
    return FrontierResult(
        frontier=tuple(chain),
        dominated=tuple(sorted(dominated)),
        extended_dominated=tuple(sorted(extended)),
        icers=icers,
    )

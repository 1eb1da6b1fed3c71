"""Turning a duplicate-producing stream with delay spikes into a paced,
duplicate-free one.

The raw stream advances a shared step clock.  The wrapper stays silent for
``n*p`` steps and afterwards releases one queued new result every ``m*d``
steps.  If the declared bounds hold, the queue is never empty at a release
deadline while new results are still to come.
"""
from __future__ import annotations

from collections import deque


class BudgetViolation(RuntimeError):
    """The declared (n, m, p, d) do not bound the raw stream."""


class CheaterWrapper:
    def __init__(self, raw, clock, n, m, p, d, strict=True):
        self.raw = raw
        self.clock = clock
        self.n, self.m, self.p, self.d = n, m, p, d
        self.strict = strict
        self.times = []
        self.stalls = []
        self.violations = []
        self.raw_count = 0
        self.unique = 0

    def deadline(self, i):
        return self.n * self.p + i * self.m * self.d

    def __iter__(self):
        table = set()
        queue = deque()
        i = 1
        stalled = False
        clock = self.clock
        for item in self.raw:
            self.raw_count += 1
            now = clock.total
            while self.deadline(i) <= now:
                if queue:
                    self.times.append(self.deadline(i))
                    yield queue.popleft()
                else:
                    self.stalls.append(self.deadline(i))
                    stalled = True
                i += 1
            if item in table:
                continue
            table.add(item)
            self.unique += 1
            if stalled:
                msg = (f"new result after an empty queue at step {self.stalls[-1]}; "
                       f"declared n={self.n} m={self.m} p={self.p} d={self.d} are too small")
                self.violations.append(msg)
                if self.strict:
                    raise BudgetViolation(msg)
                stalled = False
            queue.append(item)
        now = clock.total
        while queue and self.deadline(i) <= now:
            self.times.append(self.deadline(i))
            yield queue.popleft()
            i += 1
        t = max(now, self.times[-1] if self.times else 0)
        while queue:
            t += 1
            self.times.append(t)
            yield queue.popleft()

    def summary(self) -> dict:
        gaps = [b - a for a, b in zip(self.times, self.times[1:])]
        return {
            "preprocessing_steps": self.times[0] if self.times else self.clock.total,
            "max_delay_steps": max(gaps, default=0),
            "answers": len(self.times),
            "raw_results": self.raw_count,
            "raw_steps": self.clock.total,
            "stalls": len(self.stalls),
            "violations": list(self.violations),
            "budget": {"n": self.n, "m": self.m, "p": self.p, "d": self.d},
        }


def cheater_wrapper(raw, clock, n, m, p, d, strict=True) -> CheaterWrapper:
    return CheaterWrapper(raw, clock, n, m, p, d, strict)

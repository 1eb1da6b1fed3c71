"""Step accounting for the delay contract.

One step is one scanned tuple during preprocessing, one index probe, one
cursor advance, or one emitted answer.  Counters can be chained so that a
component's steps also advance a shared clock.
"""
from collections import Counter


class StepCounter:
    def __init__(self, parent=None):
        self.parent = parent
        self.total = 0
        self.preprocessing = 0
        self.samples = []
        self._mark = 0
        self._enumerating = False

    def add(self, k=1):
        self.total += k
        if not self._enumerating:
            self.preprocessing += k
        if self.parent is not None:
            self.parent.add(k)

    def begin_enumeration(self):
        self._enumerating = True
        self._mark = self.total

    def answer(self):
        """Record the steps spent since the previous answer, or since the
        end of preprocessing for the first one."""
        self.samples.append(self.total - self._mark)
        self._mark = self.total

    @property
    def max_delay(self):
        return max(self.samples, default=0)

    def histogram(self):
        return dict(sorted(Counter(self.samples).items()))

    def summary(self):
        return {
            "preprocessing_steps": self.preprocessing,
            "total_steps": self.total,
            "answers": len(self.samples),
            "max_delay_steps": self.max_delay,
        }

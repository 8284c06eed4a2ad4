"""Pure-Python solver kernels.

Same signatures and bit-identical results as the compiled ``_ckernels``
module; selected by ``aubalance.kernels`` when the extension is unavailable.
"""
from __future__ import annotations

import math


class _State:
    """Mutable search state with O(K) class-total updates for single-coordinate moves."""

    __slots__ = ("rows", "base", "lam", "k", "z", "ztotal", "rowsum", "counts", "ratios", "ntotal")

    def __init__(self, combos, base, counts, lam):
        self.rows = combos.tolist()
        self.base = base.tolist()
        self.lam = float(lam)
        self.k = len(self.rows[0])
        self.counts = counts.tolist()
        self.rowsum = [sum(r) for r in self.rows]
        self.z = [0] * self.k
        for c, row in zip(self.counts, self.rows):
            for i in range(self.k):
                self.z[i] += c * row[i]
        self.ztotal = sum(self.z)
        self.ratios = [c / b for c, b in zip(self.counts, self.base)]
        self.ntotal = sum(self.counts)

    def _variance(self, j, rj):
        ratios = self.ratios
        g = len(ratios)
        acc = 0.0
        for i in range(g):
            acc += rj if i == j else ratios[i]
        mean = acc / g
        acc = 0.0
        for i in range(g):
            d = (rj if i == j else ratios[i]) - mean
            acc += d * d
        return acc / g

    def evaluate(self, j=-1, value=0):
        """Objective with ``counts[j]`` replaced by ``value`` (current point when j < 0)."""
        k = self.k
        if j < 0:
            total = self.ztotal
            imb = 0
            for zc in self.z:
                imb += abs(k * zc - total)
            return float(imb) / k + self.lam * self._variance(-1, 0.0)
        delta = value - self.counts[j]
        row = self.rows[j]
        total = self.ztotal + delta * self.rowsum[j]
        imb = 0
        for i in range(k):
            imb += abs(k * (self.z[i] + delta * row[i]) - total)
        return float(imb) / k + self.lam * self._variance(j, value / self.base[j])

    def move(self, j, value):
        delta = value - self.counts[j]
        row = self.rows[j]
        for i in range(self.k):
            self.z[i] += delta * row[i]
        self.ztotal += delta * self.rowsum[j]
        self.ntotal += delta
        self.counts[j] = value
        self.ratios[j] = value / self.base[j]


def evaluate(combos, base, counts, lam):
    """Objective of ``counts`` through the kernel arithmetic (used to check bit-identity)."""
    return _State(combos, base, counts, lam).evaluate()


def descend(combos, base, lower, upper, counts, steps, max_evals, lam, budget, trace):
    """Coordinate pattern search from ``counts`` (updated in place).

    Returns ``(evaluations, objective)``. When ``trace`` is non-empty the
    best-so-far objective after each evaluation is written to it.
    """
    st = _State(combos, base, counts, lam)
    lo = lower.tolist()
    hi = upper.tolist()
    g = len(lo)
    f = st.evaluate()
    evals = 0
    tracing = len(trace) > 0
    for step in steps.tolist():
        while True:
            improved = False
            for j in range(g):
                cur = st.counts[j]
                best_f = f
                best_v = cur
                for v in (max(cur - step, lo[j]), min(cur + step, hi[j])):
                    if v == cur:
                        continue
                    if budget >= 0 and st.ntotal - cur + v > budget:
                        continue
                    if evals >= max_evals:
                        break
                    fv = st.evaluate(j, v)
                    evals += 1
                    if fv < best_f:
                        best_f = fv
                        best_v = v
                    if tracing:
                        trace[evals - 1] = best_f
                if best_v != cur:
                    st.move(j, best_v)
                    f = best_f
                    improved = True
                if evals >= max_evals:
                    break
            if evals >= max_evals:
                counts[:] = st.counts
                return evals, f
            if not improved:
                break
    counts[:] = st.counts
    return evals, f


def anneal(combos, base, lower, upper, counts, steps, lam, budget, coords, step_idx, signs, uniforms, temps):
    """Metropolis chain driven by pre-drawn random streams.

    ``counts`` is overwritten with the best point visited. Returns
    ``(evaluations, best_objective)``.
    """
    st = _State(combos, base, counts, lam)
    lo = lower.tolist()
    hi = upper.tolist()
    steps = steps.tolist()
    f = st.evaluate()
    best_f = f
    best = list(st.counts)
    evals = 0
    for j, s, sg, u, t in zip(coords.tolist(), step_idx.tolist(), signs.tolist(), uniforms.tolist(), temps.tolist()):
        cur = st.counts[j]
        v = min(max(cur + sg * steps[s], lo[j]), hi[j])
        if v == cur:
            continue
        if budget >= 0 and st.ntotal - cur + v > budget:
            continue
        fv = st.evaluate(j, v)
        evals += 1
        d = fv - f
        if d <= 0.0 or u < math.exp(-d / t):
            st.move(j, v)
            f = fv
            if f < best_f:
                best_f = f
                best = list(st.counts)
    counts[:] = best
    return evals, best_f

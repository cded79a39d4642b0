"""Finite open trajectories as first-class values.

A trajectory is a finite list of segments, each a closed-form state function
on [0, dur): a constant, an ODE flow, or a pointwise-mapped view of another
segment.  The domain of the whole trajectory is [0, total) with total the sum
of segment durations; the empty trajectory has total 0.  Concatenation
appends segment lists and adds durations, which makes it the monoid the rest
of the engine is built on.

Function equality on real intervals is not decidable, so every "equality"
here is probe-extensional: values are compared at segment boundaries of both
sides, midpoints, and a handful of seeded random probes.  `prefix_le` is the
same sampled approximation of the prefix order (sound, documented as not
complete).
"""

from __future__ import annotations

import bisect
import math
import random

from .dynamics import update_env


class OutOfDomain(IndexError):
    pass


class ConstSeg:
    """Holds one value for its whole duration; evaluation costs nothing."""

    __slots__ = ("value", "dur")

    def __init__(self, value, dur):
        if not dur > 0:
            raise ValueError(f"segment duration must be > 0, got {dur}")
        self.value = value
        self.dur = float(dur)

    def at(self, local):
        return self.value

    def truncated(self, d):
        return ConstSeg(self.value, d)

    @property
    def is_uniform(self):
        return True

    def __repr__(self):
        return f"ConstSeg({self.value!r}, dur={self.dur})"


class FlowSeg:
    """Env-valued segment following an ODE flow from its initial env."""

    __slots__ = ("flow", "dur")

    def __init__(self, flow, dur):
        if not dur > 0:
            raise ValueError(f"segment duration must be > 0, got {dur}")
        self.flow = flow
        self.dur = float(dur)

    def at(self, local):
        return update_env(self.flow.env, self.flow.at(local))

    def truncated(self, d):
        return FlowSeg(self.flow, d)

    @property
    def is_uniform(self):
        return self.flow.linsys.is_constant

    def __repr__(self):
        return f"FlowSeg(dur={self.dur}, flow={self.flow!r})"


class MappedSeg:
    """Pointwise function applied on top of another segment."""

    __slots__ = ("base", "fn", "dur")

    def __init__(self, base, fn):
        self.base = base
        self.fn = fn
        self.dur = base.dur

    def at(self, local):
        return self.fn(self.base.at(local))

    def truncated(self, d):
        return MappedSeg(self.base.truncated(d), self.fn)

    @property
    def is_uniform(self):
        return self.base.is_uniform

    def __repr__(self):
        return f"MappedSeg(dur={self.dur}, base={self.base!r})"


class Trj:
    """Finite open trajectory over [0, total)."""

    __slots__ = ("segs", "total", "_ends")

    def __init__(self, segs=()):
        self.segs = tuple(segs)
        total = 0.0
        ends = []
        for s in self.segs:
            total += s.dur
            ends.append(total)
        self.total = total
        self._ends = ends

    def at(self, tau):
        if tau < 0 or tau >= self.total:
            raise OutOfDomain(f"{tau} outside [0, {self.total})")
        i = bisect.bisect_right(self._ends, tau)
        if i >= len(self.segs):  # float edge at the last boundary
            i = len(self.segs) - 1
        # the true start is the previous cumulative end; recomputing it as
        # end - dur rounds differently and can land past tau
        start = self._ends[i - 1] if i > 0 else 0.0
        return self.segs[i].at(tau - start)

    def boundaries(self):
        """Cumulative segment start/end times, 0 and total included."""
        return [0.0] + list(self._ends)

    def __repr__(self):
        return f"Trj(total={self.total}, segs={len(self.segs)})"


EMPTY = Trj()


def concat(a, b):
    """a followed by b: at(tau) is a's value below a.total, else b shifted."""
    if not a.segs:
        return b
    if not b.segs:
        return a
    return Trj(a.segs + b.segs)


def truncate(tr, d):
    """The prefix of tr with total exactly d (0 <= d <= tr.total)."""
    if d < 0 or d > tr.total:
        raise OutOfDomain(f"cannot truncate to {d}, domain is [0, {tr.total}]")
    if d == tr.total:
        return tr
    if d == 0:
        return EMPTY
    segs = []
    acc = 0.0
    for s in tr.segs:
        if acc + s.dur <= d:
            segs.append(s)
            acc += s.dur
            if acc == d:
                break
        else:
            segs.append(s.truncated(d - acc))
            break
    return Trj(segs)


# --- probe-extensional comparison -------------------------------------------

REL_TOL = 1e-9


def values_close(a, b, tol=REL_TOL):
    """Structural closeness: floats relative to max(1, |.|), dicts/sequences
    componentwise, everything else by equality."""
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        if a == b:  # covers identical values including +-inf
            return True
        if math.isnan(a) and math.isnan(b):
            return True
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))
    if isinstance(a, dict) and isinstance(b, dict):
        if a.keys() != b.keys():
            return False
        return all(values_close(a[k], b[k], tol) for k in a)
    if isinstance(a, (tuple, list)) and isinstance(b, (tuple, list)):
        if len(a) != len(b):
            return False
        return all(values_close(x, y, tol) for x, y in zip(a, b))
    return a == b


def probe_times(a, b=None, upto=None, extra=16, seed=20):
    """Witness times: all segment boundaries of both trajectories strictly
    inside the compared domain, interval midpoints, plus `extra` seeded
    uniform draws."""
    limit = a.total if b is None else min(a.total, b.total)
    if upto is not None:
        limit = min(limit, upto)
    if limit <= 0:
        return []
    cuts = {0.0}
    for tr in (a,) if b is None else (a, b):
        for c in tr.boundaries():
            if 0.0 <= c < limit:
                cuts.add(c)
    cuts = sorted(cuts)
    probes = list(cuts)
    for lo, hi in zip(cuts, cuts[1:] + [limit]):
        probes.append((lo + hi) / 2.0)
    rng = random.Random(seed)
    probes.extend(rng.uniform(0.0, limit) for _ in range(extra))
    return sorted(p for p in probes if 0.0 <= p < limit)


def trj_close(a, b, tol=REL_TOL, probes=None):
    """Probe-extensional equality: totals within tol, values agree on probes."""
    if abs(a.total - b.total) > tol * max(1.0, a.total, b.total):
        return False
    if probes is None:
        probes = probe_times(a, b)
    return all(values_close(a.at(p), b.at(p), tol) for p in probes)


def prefix_le(a, b, probes=None, tol=REL_TOL):
    """Sampled prefix order: a.total <= b.total and a == b on [0, a.total).

    Sound but not complete (a finite probe set cannot refute equality of
    arbitrary functions).
    """
    if a.total > b.total + tol * max(1.0, a.total):
        return False
    if probes is None:
        probes = probe_times(a, upto=min(a.total, b.total))
    return all(values_close(a.at(p), b.at(p), tol) for p in probes)

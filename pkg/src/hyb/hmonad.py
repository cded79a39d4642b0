"""The trajectory-writer monad, its iteration operator, and the bridge to
the classic hybrid monad.

Elements over a value set X and state set S:

  * Conv(trj, value)     -- ran for trj.total time units, then returned value
  * Div(trj, closed, b)  -- ran out its domain without returning; a closed
                            divergent element also has the state b at the
                            closing instant (domain [0, d] rather than [0, d))
  * Lazy(handle)         -- an unresolved computation (typically a loop)
                            observable to any finite horizon via the handle

Sequencing (`kleisli`) concatenates the produced trajectory in front of
whatever the continuation produces; divergence absorbs.  Iteration (`elgot`)
is demand-driven unfolding of the least-fixpoint equation: apply the loop
body, splice the emitted prefix, continue on a "go again" value, stop on a
"return" value, suspend once the accumulated duration passes the probed
horizon.  Fuel makes it total; running out of fuel is a value, not an error.

`iota`, `tau`, `theta` and `classic_kleisli` relate this monad to the classic
one whose elements carry closed convergent trajectories; `state_kleisli` is
the composite lifting of the state-parameterized monad that `theta`
transports onto the classic one.  All the algebra is checked by sampled law
suites (see hyb.laws), not trusted.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .trajectory import (
    EMPTY, MappedSeg, Trj, concat, prefix_le, truncate, trj_close, values_close,
)


# --- tagged unions ----------------------------------------------------------

def inl(v):
    return ("inl", v)


def inr(v):
    return ("inr", v)


def is_inl(v):
    return isinstance(v, tuple) and len(v) == 2 and v[0] == "inl"


def is_inr(v):
    return isinstance(v, tuple) and len(v) == 2 and v[0] == "inr"


def untag(v):
    return v[1]


class _Bot:
    def __repr__(self):
        return "BOTTOM"


BOTTOM = _Bot()


# --- fuel -------------------------------------------------------------------

class FuelOut(Exception):
    """Internal signal: the shared budget ran dry (or a deadline hit)."""

    def __init__(self, reason="fuel"):
        self.reason = reason
        super().__init__(reason)


class Budget:
    """Shared fuel for one evaluation query; loops and atomics all draw on it."""

    def __init__(self, fuel, should_stop=None):
        self.left = int(fuel)
        self.should_stop = should_stop
        self.exhausted = False
        self.reason = None
        self.unfolds = 0
        self._ticks = 0

    def spend(self, n=1):
        if self.left < n:
            self.exhausted = True
            self.reason = self.reason or "fuel"
            raise FuelOut("fuel")
        self.left -= n
        self._ticks += n
        if self.should_stop is not None and (self._ticks & 1023) < n and self.should_stop():
            self.exhausted = True
            self.reason = "timeout"
            raise FuelOut("timeout")


# --- elements ---------------------------------------------------------------

@dataclass
class Conv:
    trj: Trj
    value: object


@dataclass
class Div:
    trj: Trj
    closed: bool = False
    boundary: object = None  # state at the closing instant, iff closed


@dataclass
class Lazy:
    handle: object  # anything with probe(horizon) -> Observed


HElem = Conv | Div | Lazy


@dataclass
class Observed:
    """Finite view of an element up to some horizon."""

    status: str  # "converged" | "running" | "diverged" | "fuel"
    trj: Trj
    value: object = None
    closed: bool = False
    boundary: object = None


def observe(m, horizon):
    if isinstance(m, Conv):
        return Observed("converged", m.trj, value=m.value)
    if isinstance(m, Div):
        return Observed("diverged", m.trj, closed=m.closed, boundary=m.boundary)
    return m.handle.probe(horizon)


def unit(x):
    return Conv(EMPTY, x)


def kleisli(f, m):
    """Lifting of f to elements: trajectory prefixes act by concatenation,
    divergent elements pass through untouched."""
    if isinstance(m, Conv):
        return _chain(m.trj, f, m.value)
    if isinstance(m, Div):
        return m
    return Lazy(_BindHandle(m.handle, f))


def _chain(prefix, f, x):
    n = f(x)
    if isinstance(n, Conv):
        return Conv(concat(prefix, n.trj), n.value)
    if isinstance(n, Div):
        return Div(concat(prefix, n.trj), n.closed, n.boundary)
    return Lazy(_ShiftHandle(prefix, n.handle))


def lazy_kleisli(f, m):
    """kleisli with the continuation deferred until a probe actually passes
    the end of m's trajectory.

    This is the sequencing the sampler uses: evaluating a program at time t
    must not touch statements the trajectory only reaches after t (they may
    not even be defined there).
    """
    if isinstance(m, Conv) and m.trj.total == 0:
        return f(m.value)  # nothing to defer past
    if isinstance(m, Div):
        return m
    return Lazy(_BindHandle(as_handle(m), f))


def hmap_value(g, m):
    """Functor action in the value set X; states untouched."""
    if isinstance(m, Conv):
        return Conv(m.trj, g(m.value))
    if isinstance(m, Div):
        return m
    return Lazy(_MapValueHandle(m.handle, g))


def _map_trj(tr, g):
    return Trj(tuple(MappedSeg(s, g) for s in tr.segs))


def hmap_states(g, m):
    """Functor action in the state set S: every trajectory point (and a
    closed boundary) maps through g; the value is untouched.  Finite
    elements only."""
    if isinstance(m, Conv):
        return Conv(_map_trj(m.trj, g), m.value)
    if isinstance(m, Div):
        return Div(_map_trj(m.trj, g), m.closed,
                   g(m.boundary) if m.closed else None)
    raise TypeError("hmap_states is defined on finite elements")


# --- lazy handles -----------------------------------------------------------

class _DoneHandle:
    """Handle view of an already-finite element."""

    def __init__(self, m):
        self.m = m

    def probe(self, horizon):
        return observe(self.m, horizon)


def as_handle(m):
    return m.handle if isinstance(m, Lazy) else _DoneHandle(m)


class _ShiftHandle:
    """A known finite prefix in front of an unresolved tail."""

    def __init__(self, prefix, inner):
        self.prefix = prefix
        self.inner = inner

    def probe(self, horizon):
        sub = self.inner.probe(max(0.0, horizon - self.prefix.total))
        return Observed(sub.status, concat(self.prefix, sub.trj), sub.value,
                        sub.closed, sub.boundary)


class _BindHandle:
    """Monadic bind deferred until the inner computation resolves within the
    probed horizon; probing beyond the inner trajectory's end is what demands
    the continuation.

    Locked like the loop handles: the continuation must fire exactly once
    even when a shared denotation is observed concurrently.  Lock order
    follows the element tree (outer before inner), so no cycles arise.
    """

    def __init__(self, inner, f):
        self.inner = inner
        self.f = f
        self.resolved = None
        self._lock = threading.Lock()

    def probe(self, horizon):
        with self._lock:
            return self._probe(horizon)

    def _probe(self, horizon):
        if self.resolved is not None:
            return observe(self.resolved, horizon)
        sub = self.inner.probe(horizon)
        if sub.status == "converged":
            if sub.trj.total > horizon:
                return Observed("running", sub.trj)
            try:
                self.resolved = _chain(sub.trj, self.f, sub.value)
            except FuelOut:
                return Observed("fuel", sub.trj)
            return observe(self.resolved, horizon)
        if sub.status == "diverged":
            self.resolved = Div(sub.trj, sub.closed, sub.boundary)
        return sub


class _MapValueHandle:
    def __init__(self, inner, g):
        self.inner = inner
        self.g = g

    def probe(self, horizon):
        sub = self.inner.probe(horizon)
        if sub.status == "converged":
            return Observed("converged", sub.trj, value=self.g(sub.value))
        return sub


class LoopHandle:
    """Demand-driven least-fixpoint unfolding of f : X -> HElem over Y (+) X.

    probe(h) unfolds until the accumulated duration passes h, the loop exits
    with an inl value, the body diverges, or fuel runs out.  The longest
    prefix computed so far is memoized, so repeated probing at growing
    horizons is amortized linear; probing is internally locked and looks like
    a pure monotone function from outside.
    """

    def __init__(self, f, x0, budget, stall_state=None):
        self.f = f
        self.x = x0
        self.budget = budget
        self.stall_state = stall_state
        self.segs = []
        self.total = 0.0
        self.state = "running"
        self.value = None
        self.closed = False
        self.boundary = None
        self.pending = None
        self.unfolds = 0
        self.last_dur = 0.0
        self._lock = threading.Lock()

    def probe(self, horizon):
        with self._lock:
            return self._probe(horizon)

    def _snapshot(self, extra=None):
        segs = tuple(self.segs) if extra is None else tuple(self.segs) + extra.segs
        return Trj(segs)

    def _fold(self, tr):
        self.segs.extend(tr.segs)
        self.total += tr.total
        self.last_dur = tr.total

    def _stall(self):
        # closure decision at a fuel stall: a zero-duration last iteration
        # with a defined state diverges precisely after the current instant
        if self.last_dur == 0.0 and self.stall_state is not None:
            self.closed = True
            self.boundary = self.stall_state(self.x)

    def _probe(self, h):
        while self.state == "running":
            if self.pending is not None:
                sub = observe(self.pending, h - self.total)
                if sub.status == "running":
                    return Observed("running", self._snapshot(sub.trj))
                if sub.status == "fuel":
                    self._fold(sub.trj)
                    self.pending = None
                    self.state = "fuel"
                    break
                if sub.status == "diverged":
                    self._fold(sub.trj)
                    self.pending = None
                    self.state = "diverged"
                    self.closed = sub.closed
                    self.boundary = sub.boundary
                    break
                # body converged: splice and route on the tag
                self._fold(sub.trj)
                self.pending = None
                v = sub.value
                if is_inl(v):
                    self.state = "converged"
                    self.value = untag(v)
                    break
                if not is_inr(v):
                    raise TypeError(f"loop body must return inl/inr values, got {v!r}")
                self.x = untag(v)
                continue
            if self.total > h:
                return Observed("running", self._snapshot())
            try:
                self.budget.spend()
                self.unfolds += 1
                self.budget.unfolds += 1
                self.pending = self.f(self.x)
            except FuelOut as e:
                self.state = "fuel"
                if e.reason == "fuel":
                    self._stall()
                break
        if self.state == "converged":
            return Observed("converged", self._snapshot(), value=self.value)
        if self.state == "diverged":
            return Observed("diverged", self._snapshot(),
                            closed=self.closed, boundary=self.boundary)
        if self.state == "fuel":
            return Observed("fuel", self._snapshot(),
                            closed=self.closed, boundary=self.boundary)
        return Observed("running", self._snapshot())


def loop(f, x0, budget, stall_state=None):
    """The iteration as an unresolved element; observation drives it."""
    return Lazy(LoopHandle(f, x0, budget, stall_state))


def elgot(f, x0, horizon, fuel=10 ** 6, stall_state=None, budget=None):
    """Iterate f from x0, observed up to `horizon`.

    Returns Conv on exit, Div on divergence or fuel exhaustion (check the
    budget for which), and a Lazy view when still running past the horizon.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    if budget is None:
        budget = Budget(fuel)
    handle = LoopHandle(f, x0, budget, stall_state)
    v = handle.probe(horizon)
    if v.status == "converged":
        return Conv(v.trj, v.value)
    if v.status == "running":
        return Lazy(handle)
    return Div(v.trj, v.closed, v.boundary)


# --- the bridge to the classic hybrid monad ---------------------------------

@dataclass
class InlVal:
    value: object


@dataclass
class InrState:
    state: object


@dataclass
class Bottom:
    pass


BOTTOM_RESULT = Bottom()


def iota(m):
    """Initial point of a non-empty trajectory; the value for an instantly
    convergent element; bottom for instant divergence."""
    if isinstance(m, Lazy):
        v = m.handle.probe(0.0)
        if v.trj.total > 0:
            return InrState(v.trj.at(0.0))
        if v.status == "converged":
            return InlVal(v.value)
        if v.closed:
            return InrState(v.boundary)
        return BOTTOM_RESULT
    if isinstance(m, Conv):
        if m.trj.total > 0:
            return InrState(m.trj.at(0.0))
        return InlVal(m.value)
    if m.trj.total > 0:
        return InrState(m.trj.at(0.0))
    if m.closed:  # domain [0, 0]: the single point is the boundary
        return InrState(m.boundary)
    return BOTTOM_RESULT


def iota_prime(m):
    """[inl, id] after iota: the observable first state, or BOTTOM."""
    r = iota(m)
    if isinstance(r, InlVal):
        return r.value
    if isinstance(r, InrState):
        return r.state
    return BOTTOM


class UndetectableCut(RuntimeError):
    """A divergence flip happened strictly inside a segment at sub-probe
    resolution; refusing to guess the cut point."""


def _first_cut(tr, diverges_at):
    """Earliest time where `diverges_at(state)` flips true, scanning
    segmentwise.  Uniform segments are decided by one evaluation; inside a
    non-uniform segment a flip past its start raises UndetectableCut."""
    acc = 0.0
    for seg in tr.segs:
        if diverges_at(seg.at(0.0)):
            return acc
        if not seg.is_uniform:
            for frac in (0.25, 0.5, 0.75, 0.999999):
                if diverges_at(seg.at(seg.dur * frac)):
                    raise UndetectableCut(
                        f"divergence flips inside a segment near t={acc + seg.dur * frac}")
        acc += seg.dur
    return None


def tau(m):
    """Restrict to the largest prefix whose states all factor through inl,
    stripping the injection; a convergent element that loses part of its
    domain becomes divergent."""
    if isinstance(m, Lazy):
        raise TypeError("tau is defined on finite elements")

    def is_right(v):
        if is_inl(v):
            return False
        if is_inr(v):
            return True
        raise TypeError(f"state is not inl/inr tagged: {v!r}")

    cut = _first_cut(m.trj, is_right)
    if cut is not None:
        return Div(_map_trj(truncate(m.trj, cut), untag), closed=False)
    stripped = _map_trj(m.trj, untag)
    if isinstance(m, Conv):
        return Conv(stripped, m.value)
    if m.closed:
        if is_right(m.boundary):
            return Div(stripped, closed=False)
        return Div(stripped, closed=True, boundary=untag(m.boundary))
    return Div(stripped, closed=False)


# classic elements: closed convergent trajectories with an endpoint value,
# or divergent trajectories (open or closed)

@dataclass
class CConv:
    trj: Trj  # open part [0, total); the endpoint value sits at total
    endpoint: object


@dataclass
class CDiv:
    trj: Trj
    closed: bool = False
    boundary: object = None


HClassic = CConv | CDiv


def is_instant_div(c):
    return isinstance(c, CDiv) and c.trj.total == 0 and not c.closed


def classic_initial(c):
    """The value of a classic element's trajectory at time 0."""
    if c.trj.total > 0:
        return c.trj.at(0.0)
    if isinstance(c, CConv):
        return c.endpoint
    if c.closed:
        return c.boundary
    raise OutOfDomainError("instant divergence has no initial point")


class OutOfDomainError(IndexError):
    pass


def classic_at(c, t):
    if t < c.trj.total:
        return c.trj.at(t)
    if t == c.trj.total:
        if isinstance(c, CConv):
            return c.endpoint
        if c.closed:
            return c.boundary
    raise OutOfDomainError(f"{t} outside the element's domain")


def theta(m):
    """The isomorphism: a convergent element becomes the closed convergent
    trajectory extending its prefix with the value at the end instant."""
    if isinstance(m, Lazy):
        raise TypeError("theta is defined on finite elements")
    if isinstance(m, Conv):
        return CConv(m.trj, m.value)
    return CDiv(m.trj, m.closed, m.boundary)


def theta_inv(c):
    if isinstance(c, CConv):
        return Conv(c.trj, c.endpoint)
    return Div(c.trj, c.closed, c.boundary)


def classic_kleisli(f, m):
    """Kleisli lifting of the classic monad over piecewise representations.

    Every surviving trajectory point maps to the initial point of its
    f-image; the surviving prefix is the largest one free of instant
    divergence, computed segmentwise (exact for uniform segments, probed
    otherwise -- a sub-probe flip raises UndetectableCut rather than
    mis-cutting).
    """
    mapped = lambda s: classic_initial(f(s))
    cut = _first_cut(m.trj, lambda s: is_instant_div(f(s)))
    if cut is not None:
        return CDiv(_map_trj(truncate(m.trj, cut), mapped), closed=False)
    if isinstance(m, CConv):
        n = f(m.endpoint)
        if is_instant_div(n):
            # everything before the endpoint survived: open divergence
            return CDiv(_map_trj(m.trj, mapped), closed=False)
        prefix = _map_trj(m.trj, mapped)
        if isinstance(n, CConv):
            return CConv(concat(prefix, n.trj), n.endpoint)
        return CDiv(concat(prefix, n.trj), n.closed, n.boundary)
    if m.closed:
        n = f(m.boundary)
        if is_instant_div(n):
            return CDiv(_map_trj(m.trj, mapped), closed=False)
        return CDiv(_map_trj(m.trj, mapped), closed=True, boundary=classic_initial(n))
    return CDiv(_map_trj(m.trj, mapped), closed=False)


def state_kleisli(f, m):
    """Kleisli lifting of the state monad S |-> H_S S: relabel every state
    point by the observable first state of its f-image, cut at instant
    divergence, then sequence the value through f.  This is the lifting that
    theta transports onto the classic monad."""

    def relabel(s):
        v = iota_prime(f(s))
        return inr(BOTTOM) if v is BOTTOM else inl(v)

    return kleisli(f, tau(hmap_states(relabel, m)))


# --- probe-extensional comparisons ------------------------------------------

def helem_close(a, b, tol=1e-9):
    """Probe-equality of finite elements (kind, trajectory, value/boundary)."""
    if isinstance(a, Lazy) or isinstance(b, Lazy):
        raise TypeError("helem_close compares finite elements")
    if isinstance(a, Conv) != isinstance(b, Conv):
        return False
    if isinstance(a, Conv):
        return values_close(a.value, b.value, tol) and trj_close(a.trj, b.trj, tol)
    if a.closed != b.closed:
        return False
    if a.closed and not values_close(a.boundary, b.boundary, tol):
        return False
    return trj_close(a.trj, b.trj, tol)


def classic_close(a, b, tol=1e-9):
    if isinstance(a, CConv) != isinstance(b, CConv):
        return False
    if isinstance(a, CConv):
        return values_close(a.endpoint, b.endpoint, tol) and trj_close(a.trj, b.trj, tol)
    if a.closed != b.closed:
        return False
    if a.closed and not values_close(a.boundary, b.boundary, tol):
        return False
    return trj_close(a.trj, b.trj, tol)


def helem_le(a, b, tol=1e-9):
    """The information order lifted from trajectory prefixes: a divergent
    element is below anything extending its trajectory; convergent elements
    are only below themselves."""
    if isinstance(a, Conv):
        return isinstance(b, Conv) and values_close(a.value, b.value, tol) \
            and trj_close(a.trj, b.trj, tol)
    if isinstance(b, Conv):
        return prefix_le(a.trj, b.trj, tol=tol)
    return prefix_le(a.trj, b.trj, tol=tol)

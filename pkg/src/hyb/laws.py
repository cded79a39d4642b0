"""Sampled law suites for the trajectory monad and its bridge maps.

Each suite draws its cases from seeded generators of piecewise-constant
trajectories with dyadic breakpoints over a 2-variable state space, so probe
sets align with breakpoints and probe-equality is exact.  Functions fed to
the laws are deterministic: the image of a value is derived from a stable
hash of the value and the suite seed.

Every suite takes the operation under test as a parameter, which is how the
negative controls inject a deliberately broken variant that must fail.
"""

from __future__ import annotations

from random import Random

from .harness import stable_seed
from .hmonad import (
    Bottom, CConv, Conv, Div, InlVal, InrState, Lazy, classic_close,
    classic_kleisli, elgot, helem_close, hmap_states, inl, inr, iota, is_inl,
    kleisli, observe, state_kleisli, tau, theta, theta_inv, unit, untag,
)
from .trajectory import (
    EMPTY, ConstSeg, Trj, concat, prefix_le, probe_times, trj_close,
    values_close,
)

DUR_GRID = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0]


def _key(v):
    if isinstance(v, dict):
        return tuple(sorted(v.items()))
    if isinstance(v, tuple):
        return tuple(_key(x) for x in v)
    return v


def fn_of(seed, gen):
    """Deterministic function: value -> gen(rng seeded by (seed, value))."""
    return lambda v: gen(Random(stable_seed(seed, _key(v))))


def gen_env(rng):
    return {"a": rng.randrange(-8, 9) * 0.25, "b": rng.randrange(-8, 9) * 0.25}


def gen_tagged(rng, p_left=0.7):
    if rng.random() < p_left:
        return inl(gen_env(rng))
    return inr(rng.randrange(0, 5))


def gen_trj(rng, gen_point, max_segs=3, allow_empty=True):
    lo = 0 if allow_empty else 1
    n = rng.randrange(lo, max_segs + 1)
    return Trj(tuple(ConstSeg(gen_point(rng), rng.choice(DUR_GRID)) for _ in range(n)))


def gen_helem(rng, gen_point, gen_value, p_div=0.3):
    tr = gen_trj(rng, gen_point)
    r = rng.random()
    if r >= p_div:
        return Conv(tr, gen_value(rng))
    if r < p_div / 2:
        return Div(tr, closed=False)
    return Div(tr, closed=True, boundary=gen_point(rng))


def _record(failures, i, name, *detail):
    failures.append({"case": i, "law": name, "detail": " ".join(map(str, detail))})


# --- monad laws ---------------------------------------------------------------

def suite_monad(seed, cases, kleisli_fn=kleisli):
    failures = []
    for i in range(cases):
        rng = Random(stable_seed("monad", seed, i))
        x = gen_env(rng)
        m = gen_helem(rng, gen_env, gen_env)
        f = fn_of(stable_seed("mf", seed, i), lambda r: gen_helem(r, gen_env, gen_env))
        g = fn_of(stable_seed("mg", seed, i), lambda r: gen_helem(r, gen_env, gen_env))
        if not helem_close(kleisli_fn(f, unit(x)), f(x)):
            _record(failures, i, "left-unit")
        if not helem_close(kleisli_fn(unit, m), m):
            _record(failures, i, "right-unit")
        lhs = kleisli_fn(f, kleisli_fn(g, m))
        rhs = kleisli_fn(lambda v: kleisli_fn(f, g(v)), m)
        if not helem_close(lhs, rhs):
            _record(failures, i, "associativity")
    return failures


def mutant_kleisli_forgets_prefix(f, m):
    # drops the already-produced trajectory in the convergent case
    if isinstance(m, Conv):
        return f(m.value)
    return m


# --- monoid-module laws --------------------------------------------------------

def suite_module(seed, cases, kleisli_fn=kleisli):
    """The action of trajectory prefixes on divergent elements, realized by
    the kleisli clause for divergent continuations."""
    failures = []
    for i in range(cases):
        rng = Random(stable_seed("module", seed, i))
        m = gen_trj(rng, gen_env)
        n = gen_trj(rng, gen_env)
        e = Div(gen_trj(rng, gen_env), closed=rng.random() < 0.3,
                boundary=gen_env(rng))
        if not e.closed:
            e = Div(e.trj, False, None)
        x = gen_env(rng)

        def act(prefix, elem):
            return kleisli_fn(lambda _: elem, Conv(prefix, x))

        if not helem_close(act(EMPTY, e), e):
            _record(failures, i, "zero-action")
        if not helem_close(act(concat(m, n), e), act(m, act(n, e))):
            _record(failures, i, "action-compose")
        expected = Div(concat(m, e.trj), e.closed, e.boundary)
        if not helem_close(act(m, e), expected):
            _record(failures, i, "action-definition")
    return failures


def mutant_kleisli_drops_action(f, m):
    # divergent continuations come back without the prefix acting on them
    if isinstance(m, Conv):
        n = f(m.value)
        if isinstance(n, Conv):
            return Conv(concat(m.trj, n.trj), n.value)
        return n
    return m


# --- iota as a monad morphism (the two unit/lifting equations) ----------------

def iota_close(a, b):
    if isinstance(a, InlVal) and isinstance(b, InlVal):
        return values_close(a.value, b.value)
    if isinstance(a, InrState) and isinstance(b, InrState):
        return values_close(a.state, b.state)
    return isinstance(a, Bottom) and isinstance(b, Bottom)


def suite_iota(seed, cases, iota_fn=iota):
    failures = []
    for i in range(cases):
        rng = Random(stable_seed("iota", seed, i))
        x = gen_env(rng)
        if not (isinstance(iota_fn(unit(x)), InlVal) and iota_fn(unit(x)).value == x):
            _record(failures, i, "unit-eq")
        m = gen_helem(rng, gen_env, gen_env)
        f = fn_of(stable_seed("if", seed, i), lambda r: gen_helem(r, gen_env, gen_env))
        lhs = iota_fn(kleisli(f, m))
        r = iota_fn(m)
        if isinstance(r, InlVal):
            rhs = iota_fn(f(r.value))
        else:
            rhs = r
        if not iota_close(lhs, rhs):
            _record(failures, i, "lifting-eq", lhs, rhs)
    return failures


def mutant_iota_ignores_trajectory(m):
    if isinstance(m, Conv):
        return InlVal(m.value)
    return iota(m)


# --- tau as a monad morphism ---------------------------------------------------

def _gen_tagged_helem(rng, branch=None):
    """Elements over tagged states, stratified to hit every proof branch:
    empty trajectory, all-left, a right-hit, divergent image."""
    branch = branch if branch is not None else rng.randrange(4)
    if branch == 0:
        return Conv(EMPTY, gen_env(rng))
    if branch == 1:
        tr = gen_trj(rng, lambda r: inl(gen_env(r)), allow_empty=False)
        return Conv(tr, gen_env(rng))
    if branch == 2:
        segs = [ConstSeg(inl(gen_env(rng)), rng.choice(DUR_GRID))]
        segs.insert(rng.randrange(0, 2), ConstSeg(gen_tagged(rng, p_left=0.3),
                                                  rng.choice(DUR_GRID)))
        return Conv(Trj(tuple(segs)), gen_env(rng))
    tr = gen_trj(rng, gen_tagged)
    if rng.random() < 0.4:
        return Div(tr, closed=True, boundary=gen_tagged(rng))
    return Div(tr, closed=False)


def _expected_tau(m):
    # independent oracle: scan the generated constant segments directly
    segs = []
    for s in m.trj.segs:
        if is_inl(s.value):
            segs.append(ConstSeg(untag(s.value), s.dur))
        else:
            return Div(Trj(tuple(segs)), False, None)
    if isinstance(m, Conv):
        return Conv(Trj(tuple(segs)), m.value)
    if m.closed and is_inl(m.boundary):
        return Div(Trj(tuple(segs)), True, untag(m.boundary))
    return Div(Trj(tuple(segs)), False, None)


def suite_tau(seed, cases, tau_fn=tau):
    failures = []
    for i in range(cases):
        rng = Random(stable_seed("tau", seed, i))
        x = gen_env(rng)
        if not helem_close(tau_fn(unit(x)), unit(x)):
            _record(failures, i, "unit-eq")
        m = _gen_tagged_helem(rng, branch=i % 4)
        if not helem_close(tau_fn(m), _expected_tau(m)):
            _record(failures, i, "cut-definition")
        f = fn_of(stable_seed("tf", seed, i),
                  lambda r: _gen_tagged_helem(r))
        lhs = tau_fn(kleisli(f, m))
        rhs = kleisli(lambda v: tau_fn(f(v)), tau_fn(m))
        if not helem_close(lhs, rhs):
            _record(failures, i, "lifting-eq")
    return failures


def mutant_tau_never_cuts(m):
    # strips tags but keeps the whole trajectory and convergence
    strip = lambda v: untag(v) if is_inl(v) else v
    return hmap_states(strip, m)


# --- joint equations of iota and tau ------------------------------------------

def suite_joint(seed, cases, tau_fn=tau, iota_fn=iota):
    failures = []
    for i in range(cases):
        rng = Random(stable_seed("joint", seed, i))
        m = _gen_tagged_helem(rng, branch=i % 4)
        # iota after tau, versus relabeling iota's answer
        lhs = iota_fn(tau_fn(m))
        r = iota_fn(m)
        if isinstance(r, InlVal):
            rhs = r
        elif isinstance(r, InrState):
            rhs = InrState(untag(r.state)) if is_inl(r.state) else Bottom()
        else:
            rhs = r
        if not iota_close(lhs, rhs):
            _record(failures, i, "iota-tau", lhs, rhs)
        # relabel-then-cut versus cut-relabel-cut
        f = fn_of(stable_seed("jf", seed, i),
                  lambda r: inl(gen_env(r)) if r.random() < 0.6 else inr(r.randrange(3)))
        m2 = _gen_tagged_helem(rng, branch=rng.randrange(4))
        relabel = lambda v: f(untag(v)) if is_inl(v) else v
        lhs2 = tau_fn(hmap_states(relabel, m2))
        rhs2 = tau_fn(hmap_states(f, tau_fn(m2)))
        if not helem_close(lhs2, rhs2):
            _record(failures, i, "tau-relabel")
    return failures


# --- theta isomorphism and kleisli transport ------------------------------------

def _gen_state_helem(rng):
    """Element over S = env with its value also in S (the X = S instance)."""
    return gen_helem(rng, gen_env, gen_env)


def _gen_state_fn(seed, p_instant=0.15):
    def gen(rng):
        if rng.random() < p_instant:
            return Div(EMPTY, closed=False)  # instant divergence
        return _gen_state_helem(rng)

    return fn_of(seed, gen)


def suite_theta(seed, cases, theta_fn=theta, state_kleisli_fn=state_kleisli,
                classic_kleisli_fn=classic_kleisli):
    failures = []
    for i in range(cases):
        rng = Random(stable_seed("theta", seed, i))
        m = _gen_state_helem(rng)
        if not helem_close(theta_inv(theta_fn(m)), m):
            _record(failures, i, "round-trip")
        x = gen_env(rng)
        u = theta_fn(unit(x))
        if not (isinstance(u, CConv) and u.trj.total == 0 and u.endpoint == x):
            _record(failures, i, "unit")
        f = _gen_state_fn(stable_seed("thf", seed, i))
        lhs = theta_fn(state_kleisli_fn(f, m))
        rhs = classic_kleisli_fn(lambda s: theta_fn(f(s)), theta_fn(m))
        if not classic_close(lhs, rhs):
            _record(failures, i, "kleisli-transport")
    return failures


def mutant_theta_drops_endpoint(m):
    if isinstance(m, Conv) and m.trj.total > 0:
        return CConv(m.trj, m.trj.at(0.0))
    return theta(m)


# --- Elgot iteration: fixpoint law and chain monotonicity -----------------------

def _gen_loop_fn(seed, rng):
    """Counting loop: bump a, emit a stage, exit once a passes a threshold."""
    threshold = rng.randrange(1, 4)
    durs = [rng.choice([0.0, 0.25, 0.5, 1.0]) for _ in range(4)]
    terminates = rng.random() < 0.85

    def f(env):
        k = int(env["a"])
        if terminates and k >= threshold:
            return unit(inl(env))
        nxt = dict(env)
        nxt["a"] = env["a"] + 1.0
        d = durs[k % 4]
        if d == 0.0:
            return unit(inr(nxt))
        return Conv(Trj((ConstSeg(env, d),)), inr(nxt))

    return f


def _observe_elgot(result, horizon):
    if isinstance(result, Lazy):
        return result.handle.probe(horizon)
    return observe(result, horizon)


def _views_close(va, vb, horizon):
    # a result resolved past the horizon may legitimately show as still
    # running on the other side; within the horizon both must agree
    conv_a = va.status == "converged" and va.trj.total <= horizon
    conv_b = vb.status == "converged" and vb.trj.total <= horizon
    if conv_a != conv_b:
        return False
    if conv_a:
        return values_close(va.value, vb.value) and trj_close(va.trj, vb.trj)
    upto = min(va.trj.total, vb.trj.total, horizon)
    probes = probe_times(va.trj, vb.trj, upto=upto)
    return all(values_close(va.trj.at(p), vb.trj.at(p)) for p in probes)


def suite_elgot(seed, cases, elgot_fn=elgot):
    failures = []
    for i in range(cases):
        rng = Random(stable_seed("elgot", seed, i))
        f = _gen_loop_fn(stable_seed("ef", seed, i), rng)
        x0 = {"a": 0.0, "b": rng.randrange(-4, 5) * 0.25}
        h = rng.choice([0.25, 0.5, 1.0, 2.0, 4.0])
        fuel = 300

        # fixpoint: one unrolling equals the iteration
        rhs = elgot_fn(f, x0, h, fuel=fuel)
        step = f(x0)
        branch = lambda v: unit(untag(v)) if is_inl(v) else elgot_fn(f, untag(v), h, fuel=fuel)
        lhs = kleisli(branch, step)
        if not _views_close(_observe_elgot(lhs, h), _observe_elgot(rhs, h), h):
            _record(failures, i, "fixpoint")

        # the approximation chain is monotone in the horizon
        h2 = h + rng.choice([0.25, 1.0, 2.0])
        va = _observe_elgot(elgot_fn(f, x0, h, fuel=fuel), h)
        vb = _observe_elgot(elgot_fn(f, x0, h2, fuel=fuel), h2)
        if not prefix_le(va.trj, vb.trj):
            _record(failures, i, "chain-monotone")
    return failures


def mutant_elgot_skips_first(f, x0, horizon, fuel=10 ** 6, **kw):
    # discards the first emitted stage before iterating
    first = f(x0)
    if isinstance(first, Conv) and is_inl(first.value):
        return unit(untag(first.value))
    if isinstance(first, Conv):
        return elgot(f, untag(first.value), horizon, fuel=fuel)
    return first


# --- suite registry -------------------------------------------------------------

SUITES = {
    "monad-laws": (suite_monad, mutant_kleisli_forgets_prefix, "kleisli_fn"),
    "module-laws": (suite_module, mutant_kleisli_drops_action, "kleisli_fn"),
    "iota-morphism": (suite_iota, mutant_iota_ignores_trajectory, "iota_fn"),
    "tau-morphism": (suite_tau, mutant_tau_never_cuts, "tau_fn"),
    "joint-laws": (suite_joint, mutant_tau_never_cuts, "tau_fn"),
    "theta-iso": (suite_theta, mutant_theta_drops_endpoint, "theta_fn"),
    "elgot-iteration": (suite_elgot, mutant_elgot_skips_first, "elgot_fn"),
}


def run_law_suites(seed=0, cases=1000, negative_controls=True):
    """Run every law suite; returns {suite: {cases, failures, mutant_failed}}."""
    report = {}
    for name, (suite, mutant, param) in SUITES.items():
        failures = suite(seed, cases)
        entry = {"cases": cases, "failures": failures}
        if negative_controls:
            bad = suite(seed, min(cases, 120), **{param: mutant})
            entry["mutant_failed"] = bool(bad)
        report[name] = entry
    return report

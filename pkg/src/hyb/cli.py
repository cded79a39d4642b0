"""Command line front end: batch evaluation, an interactive REPL, the HTTP
service, differential fuzzing, and the algebra law runner.

Batch exit codes: 0 for a value/terminated outcome, 2 for fuel exhaustion,
3 for parse/file errors.
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import corpus, denotational, smallstep, wire
from .parser import ParseError, parse, try_parse
from .service import evaluate_source, zero_env
from .smallstep import NegativeDuration


def _fmt(x):
    if isinstance(x, float) and x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _print_env(env, order):
    return " ".join(f"{x}={_fmt(env[x])}" for x in order)


def _write_csv(path, points, order):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + list(order) + ["marker"])
        for t, r in points:
            if isinstance(r, denotational.ValueAt):
                w.writerow([repr(t)] + [repr(r.env[x]) for x in order] + [""])
            elif isinstance(r, denotational.TerminatedAt):
                w.writerow([repr(t)] + [repr(r.env[x]) for x in order] + ["terminated"])
            elif isinstance(r, denotational.DivergedBefore):
                w.writerow([repr(t)] + [""] * len(order) + ["diverged"])
            else:
                w.writerow([repr(t)] + [""] * len(order) + ["fuel"])


def cmd_run(args):
    try:
        source = open(args.file, encoding="utf-8").read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    result, diags = try_parse(source)
    if result is None:
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
        return 3

    try:
        if args.trace is not None:
            points = denotational.sem_trace(result.prog, zero_env(result.variables),
                                            args.trace, args.samples, fuel=args.fuel,
                                            tol=args.guard_tolerance)
            if args.json:
                print(wire.dumps(wire.trace_response(points, result.variables)))
            if args.out:
                _write_csv(args.out, points, result.variables)
            statuses = {type(r).__name__ for _, r in points}
            return 2 if "FuelExhausted" in statuses else 0

        out, _ = evaluate_source(source, args.at, fuel=args.fuel,
                                 tol=args.guard_tolerance, semantics=args.semantics)
    except (NegativeDuration, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    if args.json:
        print(wire.dumps(out))
    else:
        if out["status"] == "value":
            print("value " + _print_env(out["env"], result.variables))
        elif out["status"] == "terminated":
            print(f"terminated after {_fmt(out['duration'])} "
                  + _print_env(out["env"], result.variables))
        else:
            print("fuel exhausted")
    return 2 if out["status"] == "fuel" else 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    app = create_app(workers=args.workers, timeout=args.timeout,
                     cors_origins=args.cors_origin)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_fuzz(args):
    from .harness import find_discrepancies

    def on_case(i, d):
        if d is not None:
            print(d.to_json())

    stats = {}
    found = find_discrepancies(args.cases, seed=args.seed, fuel=args.fuel,
                               on_case=on_case, stats=stats)
    print(f"# {args.cases} cases, {len(found)} discrepancies, "
          f"{stats.get('boundary', 0)} near-boundary agreements", file=sys.stderr)
    return 1 if found else 0


def cmd_laws(args):
    from .laws import run_law_suites

    report = run_law_suites(seed=args.seed, cases=args.cases)
    bad = False
    for name, entry in report.items():
        n = len(entry["failures"])
        control = "control-ok" if entry.get("mutant_failed") else "CONTROL-SILENT"
        print(f"{name}: {entry['cases']} cases, {n} failures, {control}")
        for f in entry["failures"][:5]:
            print(f"  {f}")
        bad = bad or n > 0 or not entry.get("mutant_failed", True)
    return 1 if bad else 0


def cmd_example(args):
    try:
        print(corpus.source(args.name), end="")
    except KeyError as e:
        print(e.args[0], file=sys.stderr)
        return 1
    return 0


class Repl:
    """Line-oriented session: load a program, then query it repeatedly."""

    def __init__(self, out=sys.stdout):
        self.out = out
        self.prog = None
        self.variables = ()
        self.fuel = 10 ** 6
        self.tol = 0.0
        self.source = None

    def say(self, msg):
        print(msg, file=self.out)

    def load(self, path):
        try:
            source = open(path, encoding="utf-8").read()
        except OSError as e:
            self.say(f"error: {e}")
            return
        self.load_source(source, path)

    def load_source(self, source, name="<input>"):
        result, diags = try_parse(source)
        if result is None:
            for d in diags:
                self.say(f"error: {d}")
            return
        self.prog = result.prog
        self.variables = result.variables
        self.source = source
        self.say(f"loaded {name} (variables: {', '.join(self.variables)})")

    def _need_prog(self):
        if self.prog is None:
            self.say("no program loaded; use :load FILE")
            return True
        return False

    def eval_at(self, t, semantics="small"):
        if self._need_prog():
            return
        out, _ = evaluate_source(self.source, t, fuel=self.fuel, tol=self.tol,
                                 semantics=semantics)
        if out["status"] == "value":
            self.say("value " + _print_env(out["env"], self.variables))
        elif out["status"] == "terminated":
            self.say(f"terminated after {_fmt(out['duration'])} "
                     + _print_env(out["env"], self.variables))
        else:
            self.say("fuel exhausted")

    def steps(self, t, limit=50):
        if self._need_prog():
            return
        out, trace = smallstep.run(self.prog, zero_env(self.variables), t,
                                   fuel=limit, trace_limit=limit, tol=self.tol)
        for e in trace:
            self.say(f"  ({e.rule})  {_print_env(e.after.env, self.variables)}"
                     f"  t={_fmt(e.after.t)}")
        if isinstance(out, smallstep.AtTime):
            self.say(f"stop {_print_env(out.env, self.variables)} t=0")
        elif isinstance(out, smallstep.Terminated):
            self.say(f"skip {_print_env(out.env, self.variables)} "
                     f"(consumed {_fmt(out.total_duration)})")
        else:
            self.say(f"... truncated after {limit} steps")

    def trace(self, t_max, samples, path):
        if self._need_prog():
            return
        points = denotational.sem_trace(self.prog, zero_env(self.variables),
                                        t_max, samples, fuel=self.fuel, tol=self.tol)
        _write_csv(path, points, self.variables)
        self.say(f"wrote {samples} samples to {path}")

    def dispatch(self, line):
        """Returns False when the session should end."""
        line = line.strip()
        if not line:
            return True
        if not line.startswith(":"):
            self.say("commands start with ':' (:help for a list)")
            return True
        parts = line.split()
        cmd, rest = parts[0], parts[1:]
        try:
            if cmd == ":quit":
                return False
            if cmd == ":help":
                self.say(":load FILE | :eval T [small|big|den] | "
                         ":trace T_MAX N FILE.csv | :steps T [N] | :fuel N | "
                         ":set guard-tolerance D | :quit")
            elif cmd == ":load":
                self.load(rest[0])
            elif cmd == ":eval":
                self.eval_at(float(rest[0]), rest[1] if len(rest) > 1 else "small")
            elif cmd == ":steps":
                self.steps(float(rest[0]), int(rest[1]) if len(rest) > 1 else 50)
            elif cmd == ":trace":
                self.trace(float(rest[0]), int(rest[1]), rest[2])
            elif cmd == ":fuel":
                self.fuel = int(rest[0])
                self.say(f"fuel = {self.fuel}")
            elif cmd == ":set" and rest and rest[0] == "guard-tolerance":
                self.tol = float(rest[1])
                self.say(f"guard tolerance = {self.tol}")
            else:
                self.say(f"unknown command {cmd} (:help for a list)")
        except (IndexError, ValueError) as e:
            self.say(f"usage error: {e}")
        except (ParseError, NegativeDuration) as e:
            self.say(f"error: {e}")
        return True


def cmd_repl(args):
    repl = Repl()
    if args.file:
        repl.load(args.file)
    while True:
        try:
            line = input("hyb> ")
        except EOFError:
            break
        except KeyboardInterrupt:
            print()
            break
        if not repl.dispatch(line):
            break
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="hyb",
                                description="hybrid while-language workbench")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evaluate a .hyb file")
    r.add_argument("file")
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--at", type=float, help="time instant to evaluate at")
    g.add_argument("--trace", type=float, metavar="T_MAX",
                   help="sample the trajectory on [0, T_MAX]")
    r.add_argument("--samples", type=int, default=101)
    r.add_argument("--out", help="CSV output path for --trace")
    r.add_argument("--fuel", type=int, default=10 ** 6)
    r.add_argument("--semantics", choices=("small", "big", "den"), default="small")
    r.add_argument("--guard-tolerance", type=float, default=0.0)
    r.add_argument("--json", action="store_true",
                   help="print the service wire shape")
    r.set_defaults(fn=cmd_run)

    i = sub.add_parser("repl", help="interactive session")
    i.add_argument("file", nargs="?")
    i.set_defaults(fn=cmd_repl)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8787)
    s.add_argument("--workers", type=int, default=8)
    s.add_argument("--timeout", type=float, default=5.0)
    s.add_argument("--cors-origin", action="append", default=[])
    s.set_defaults(fn=cmd_serve)

    f = sub.add_parser("fuzz", help="differential-test the three semantics")
    f.add_argument("--cases", type=int, default=1000)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--fuel", type=int, default=10 ** 5)
    f.set_defaults(fn=cmd_fuzz)

    l = sub.add_parser("laws", help="run the algebra law suites")
    l.add_argument("--cases", type=int, default=1000)
    l.add_argument("--seed", type=int, default=0)
    l.set_defaults(fn=cmd_laws)

    e = sub.add_parser("example", help="print a bundled example program")
    e.add_argument("name", choices=sorted(corpus.PROGRAMS))
    e.set_defaults(fn=cmd_example)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

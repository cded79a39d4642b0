"""Bundled example programs (also shipped as .hyb files in hyb/corpus/)."""

CRUISE = """\
# periodic cruise control: accelerate below the target speed, else brake
v := 5 ;
while true {
  if v <= 10 then { v' = 1 for 1 } else { v' = -1 for 1 }
}
"""

ZENO = """\
# halving waits accumulate to time 2 and never get past it
x := 1 ;
while true { wait x ; x := 0.5 * x }
"""

BOUNCING_BALL = """\
# drop from 5m; each impact keeps half the speed, checked every 0.01
p := 5 ; v := 0 ;
while true {
  p' = v, v' = -9.8 until [0.01] p <= 0 && v <= 0 ;
  v := -0.5 * v
}
"""

INFINITE_LOOP = """\
# one bump per time unit, forever
x := 0 ;
while true { x := x + 1 ; wait 1 }
"""

PROGRAMS = {
    "cruise": CRUISE,
    "zeno": ZENO,
    "ball": BOUNCING_BALL,
    "loop": INFINITE_LOOP,
}


def source(name):
    try:
        return PROGRAMS[name]
    except KeyError:
        raise KeyError(f"unknown example {name!r}; have {sorted(PROGRAMS)}") from None


def write_files(directory):
    """Export every example as NAME.hyb under `directory`."""
    import pathlib

    d = pathlib.Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in PROGRAMS.items():
        path = d / f"{name}.hyb"
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths

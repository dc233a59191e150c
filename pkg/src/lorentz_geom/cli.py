"""Command-line front end.

Every subcommand reads JSON (``--input`` file or stdin), runs one library
pipeline and writes a self-contained report embedding the library version
and the full job config.  Exit codes: 0 success, 2 unreadable input, 3
domain error; errors are reported as JSON on stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import GeometryError

FORMATS = ("json", "csv", "svg")


class InputError(Exception):
    """Unreadable or malformed input (exit code 2)."""


@dataclass(frozen=True)
class JobConfig:
    command: str
    input: str | None = None
    out: str | None = None
    tol: float | None = None
    max_word: int | None = None
    seed: int = 0
    format: str = "json"
    jobs: int = 1
    params: dict = field(default_factory=dict)

    def to_json(self):
        d = asdict(self)
        d.pop("out")
        return d


def to_py(x):
    """Plain-JSON copy of nested numpy/dataclass data."""
    if hasattr(x, "to_json"):
        return to_py(x.to_json())
    if isinstance(x, dict):
        return {str(k): to_py(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_py(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_py(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


# ---------------------------------------------------------------------------
# Input parsing (errors here exit with code 2)

def _matrix(obj, name="matrix"):
    try:
        m = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as e:
        raise InputError(f"{name}: not a numeric matrix") from e
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise InputError(f"{name}: expected a finite 2x2 matrix")
    return m


def _group(obj, name="matrix"):
    from .lie import GroupElement
    try:
        return GroupElement.from_matrix(_matrix(obj, name))
    except ValueError as e:
        raise InputError(f"{name}: {e}") from e


def _rep(obj, name="representation"):
    from .reps import Representation
    gens = obj.get("generators") if isinstance(obj, dict) else obj
    if not isinstance(gens, list) or not gens:
        raise InputError(f"{name}: expected a list of generator matrices")
    return Representation([_group(g, f"{name} generator {i}") for i, g in enumerate(gens)])


def _surface(obj):
    from .schottky import schottky_fuchsian
    if obj is None:
        obj = {"kind": "pants", "lengths": [2.0, 3.0, 2.5]}
    if not isinstance(obj, dict):
        raise InputError("surface: expected an object")
    kind = obj.get("kind", "pants")
    if kind not in ("pants", "torus", "generators"):
        raise InputError(f"surface: unknown kind {kind!r}")
    if kind == "generators":
        return lambda: schottky_fuchsian("generators", generators=_rep(obj["generators"]).generators)
    lengths = obj.get("lengths", [2.0, 2.0, 2.0])
    try:
        lengths = tuple(float(x) for x in lengths)
    except (TypeError, ValueError) as e:
        raise InputError("surface: lengths must be numbers") from e
    if len(lengths) != 3 or min(lengths) <= 0:
        raise InputError("surface: three positive lengths expected")
    return lambda: schottky_fuchsian(kind, lengths)


def _cocycle(obj, base):
    from .lie import AlgebraElement
    from .reps import Cocycle
    vals = obj.get("values") if isinstance(obj, dict) else obj
    if not isinstance(vals, list):
        raise InputError("cocycle: expected a list of values")
    out = []
    for i, v in enumerate(vals):
        m = _matrix(v, f"cocycle value {i}")
        if abs(m[0, 0] + m[1, 1]) > 1e-9:
            raise InputError(f"cocycle value {i}: not traceless")
        out.append(AlgebraElement.from_matrix(m))
    try:
        return Cocycle(base, out)
    except ValueError as e:
        raise InputError(f"cocycle: {e}") from e


def _floats(obj, name):
    try:
        return [float(x) for x in obj]
    except (TypeError, ValueError) as e:
        raise InputError(f"{name}: expected a list of numbers") from e


def _instance_config(obj, seed):
    from .contraction.instance import StripInstanceConfig
    obj = obj or {}
    try:
        return StripInstanceConfig(
            lengths=tuple(_floats(obj.get("lengths", [2.0, 3.0, 2.5]), "lengths")),
            system=int(obj.get("system", 1)),
            weights=tuple(_floats(obj.get("weights", [0.3, 0.4, 0.3]), "weights")),
            mesh=float(obj.get("mesh", 0.3)), seed=seed)
    except (TypeError, ValueError) as e:
        raise InputError(f"instance: {e}") from e


# ---------------------------------------------------------------------------
# Commands: each returns (result, csv rows or None)

def cmd_classify(data, cfg):
    from .lie import classify
    m = data.get("matrix") if isinstance(data, dict) else data
    return classify(_group(m)).value, None


def cmd_delta(data, cfg):
    from .ads import classify_line, delta_crossratio, delta_trace
    if not isinstance(data, dict) or "a" not in data or "b" not in data:
        raise InputError("delta: expected {\"a\": matrix, \"b\": matrix}")
    a, b = _group(data["a"], "a"), _group(data["b"], "b")
    tol = cfg.tol or 1e-10
    d = delta_trace(a, b, tol)
    if data.get("details"):
        return {"delta": d.to_json(), "crossratio": delta_crossratio(a, b, tol).to_json(),
                "line": classify_line(a, b, tol).value}, None
    return d.to_json(), None


def cmd_figure(data, cfg):
    from .ads import FIGURE_COLUMNS, figure_data, figure_svg
    rows = figure_data()
    if cfg.format == "svg":
        return figure_svg(rows), None
    return {"columns": list(FIGURE_COLUMNS), "rows": rows}, [{k: r[k] for k in FIGURE_COLUMNS} for r in rows]


def cmd_properness(data, cfg):
    from .contraction.properness import properness_violation_search
    from .lengths import length_ratio_sup
    from .words import Word
    if not isinstance(data, dict) or "j" not in data or "rho" not in data:
        raise InputError("properness: expected {\"j\": rep, \"rho\": rep}")
    j, rho = _rep(data["j"], "j"), _rep(data["rho"], "rho")
    if j.rank != rho.rank:
        raise InputError("properness: j and rho have different ranks")
    L = cfg.max_word or 6
    N = int(data.get("N", 12))
    R = float(data.get("R", 2.0))
    beta = Word.parse(data["beta"]) if "beta" in data else None
    gamma = Word.parse(data["gamma"]) if "gamma" in data else None
    ratio = length_ratio_sup(j, rho, L)
    search = properness_violation_search(j, rho, R, N, beta, gamma)
    tol = cfg.tol or 1e-9
    if search.witness:
        verdict = "violated"
    elif ratio.value < 1 - tol and search.slope > 0:
        verdict = "certified"
    else:
        verdict = "inconclusive"
    result = {"verdict": verdict, "length_ratio_sup": ratio.value, "argmax": str(ratio.word),
              "L": L, "search": search.to_json(),
              "note": "word-length truncated test; a certified verdict is not a proof of properness"}
    rows = [{"n": n + 1, "psi": p, "gap": g} for n, (p, g) in enumerate(zip(search.psi, search.gaps))]
    return result, rows


def cmd_admissible(data, cfg):
    from .lengths import admissibility_test
    if not isinstance(data, dict) or "cocycle" not in data:
        raise InputError("admissible: expected {\"cocycle\": ...}")
    c = data["cocycle"]
    if isinstance(c, dict) and "base" in c:
        base = _rep(c["base"], "base")
    elif "surface" in data or "j" in data:
        base = _rep(data["j"], "j") if "j" in data else _surface(data["surface"])().rep
    else:
        raise InputError("admissible: the cocycle needs a base representation")
    u = _cocycle(c, base)
    rep = admissibility_test(base, u, cfg.max_word or 6, cfg.tol or 1e-6)
    return rep.to_json(), None


def _system(atlas, which):
    if isinstance(which, int):
        if not 0 <= which < len(atlas.strips):
            raise InputError(f"system index {which} out of range (0..{len(atlas.strips) - 1})")
        return atlas.strips[which]
    if isinstance(which, list):
        try:
            return atlas.find(which)
        except KeyError as e:
            raise InputError(f"no filling system with arcs {which}") from e
    raise InputError("system: expected an index or a list of arc labels")


def cmd_strip(data, cfg):
    from .lengths import admissibility_test, length_ratio_sup
    from .strips import StripAtlas, SurfaceModel, macro_strip, strip_cocycle, strip_data, strip_map
    if not isinstance(data, dict) or "widths" not in data:
        raise InputError("strip: expected {\"surface\", \"system\", \"widths\"}")
    make = _surface(data.get("surface"))
    widths = np.array(_floats(data["widths"], "widths"))
    which = data.get("system", 0)
    surf = make()
    atlas = StripAtlas(SurfaceModel(surf), cfg.max_word or 2)
    ss = _system(atlas, which)
    if len(widths) != len(ss.arcs):
        raise InputError(f"strip: {len(ss.arcs)} widths expected")
    rho = macro_strip(ss, widths)
    u = strip_cocycle(ss, widths)
    L = 6
    return {
        "surface": surf.to_json(),
        "arcs": [a.label for a in ss.arcs],
        "strips": [strip_data(a, w) for a, w in zip(ss.arcs, widths)],
        "rho": rho.to_json(),
        "cocycle": u.to_json(),
        "length_ratio_sup": length_ratio_sup(surf.rep, rho, L).value,
        "admissibility": admissibility_test(surf.rep, u, L).to_json(),
        "strip_map": list(strip_map(ss, widths)),
    }, None


def cmd_invert(data, cfg):
    from .strips import StripAtlas, SurfaceModel, invert_strip_map
    if not isinstance(data, dict) or "cocycle" not in data:
        raise InputError("invert: expected {\"surface\", \"cocycle\"}")
    surf = _surface(data.get("surface"))()
    u = _cocycle(data["cocycle"], surf.rep)
    atlas = StripAtlas(SurfaceModel(surf), cfg.max_word or 2)
    res = invert_strip_map(atlas, u, cfg.tol or 1e-9)
    return res.to_json(), None


def cmd_fibration(data, cfg):
    from .contraction.instance import build_strip_instance, fibration_suite
    data = data or {}
    mode = data.get("mode", "macro")
    if mode not in ("macro", "micro"):
        raise InputError("fibration: mode must be macro or micro")
    try:
        n, t = int(data.get("samples", 1000)), float(data.get("t", 1.0))
    except (TypeError, ValueError) as e:
        raise InputError(f"fibration: {e}") from e
    inst = build_strip_instance(_instance_config(data.get("instance"), cfg.seed))
    return fibration_suite(inst, mode, n, cfg.seed, t), None


def cmd_transition(data, cfg):
    from .contraction.fibration import transition_fiber_check
    from .contraction.instance import build_strip_instance
    from .contraction.instance import derivative_gap
    data = data or {}
    ts = _floats(data.get("ts", [1e-1, 1e-2, 1e-3]), "ts")
    X = _floats(data.get("X", [0.0, 0.0, 0.0]), "X")
    if len(X) != 3:
        raise InputError("transition: X must be (a, b, c)")
    n = int(data.get("samples", 300))
    inst = build_strip_instance(_instance_config(data.get("instance"), cfg.seed))
    rng = np.random.default_rng(cfg.seed)
    pts = inst.domain.sample_points(n, rng)
    rep = transition_fiber_check(lambda t: inst.macro_map(t, n=1000), inst.field, X, ts, pts)
    result = rep.to_json()
    result["cocycle_gap"] = derivative_gap(inst.family, inst.cocycle)
    return result, rep.rows()


COMMANDS = {
    "classify": cmd_classify, "delta": cmd_delta, "figure": cmd_figure,
    "properness": cmd_properness, "admissible": cmd_admissible, "strip": cmd_strip,
    "invert": cmd_invert, "fibration": cmd_fibration, "transition": cmd_transition,
}
NO_INPUT = {"figure", "fibration", "transition"}


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _emit_error(InputError(message), None)
        sys.exit(2)


def build_parser():
    p = _Parser(prog="lorentz-geom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--input", help="JSON input file ('-' or omitted: stdin)")
        s.add_argument("--out", help="output file (default stdout)")
        s.add_argument("--tol", type=float)
        s.add_argument("--max-word", type=int)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--format", choices=FORMATS, default="json")
        s.add_argument("--jobs", type=int, default=1,
                       help="accepted for interface stability; sweeps run vectorized in one process")
    return p


def _read_input(path, command):
    if path is None and command in NO_INPUT:
        return None
    try:
        text = sys.stdin.read() if path in (None, "-") else open(path).read()
    except OSError as e:
        raise InputError(f"cannot read input: {e}") from e
    if not text.strip():
        if command in NO_INPUT:
            return None
        raise InputError("empty input")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e}") from e


def _emit_error(exc, cfg):
    code = "parse_error" if isinstance(exc, InputError) else getattr(exc, "code", "domain_error")
    report = {"version": __version__, "error": {"code": code, "message": str(exc),
                                                 "type": type(exc).__name__}}
    if cfg is not None:
        report["config"] = to_py(cfg.to_json())
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")


def render(result, rows, cfg) -> str:
    if cfg.format == "svg":
        if not isinstance(result, str):
            raise InputError(f"{cfg.command} has no SVG output")
        return result
    if cfg.format == "csv":
        if rows is None:
            raise InputError(f"{cfg.command} has no CSV output")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()) if rows else [], lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(to_py(r))
        return buf.getvalue()
    report = {"command": cfg.command, "version": __version__, "config": cfg.to_json(),
              "result": result}
    return json.dumps(to_py(report), sort_keys=True, indent=2) + "\n"


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = JobConfig(args.command, args.input, args.out, args.tol, args.max_word, args.seed,
                    args.format, args.jobs)
    try:
        data = _read_input(args.input, args.command)
        cfg = JobConfig(**{**asdict(cfg), "params": data if isinstance(data, dict) else
                           ({"value": data} if data is not None else {})})
        result, rows = COMMANDS[args.command](data, cfg)
        text = render(result, rows, cfg)
    except InputError as e:
        _emit_error(e, cfg)
        return 2
    except (GeometryError, ValueError, ArithmeticError) as e:
        _emit_error(e, cfg)
        return 3
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

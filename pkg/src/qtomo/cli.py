"""
Command line front end.

    qtomo state     --q 0.9 --state cat-even --alpha-re 0.7071067811865476
    qtomo tomogram  --q 0.9 --state squeezed-vacuum --r 0.5 --out fig1b.csv
    qtomo moments   --q 0.9 --state coherent --alpha-re 0.7071067811865476 --gamma-max 4
    qtomo moments   --q 0.9 --input fig1b.csv --gamma-max 4
    qtomo verify    --out report.json

Options may also come from ``--config file.json`` whose keys mirror the
long flags (``gamma_max`` for ``--gamma-max`` and so on); flags given on
the command line win.  CSV outputs start with one ``#`` comment line that
holds the resolved configuration as JSON.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, fock, states, verify
from .errors import IncompatibleGrid, QTomoError
from .moments import moment_table_from_tomogram
from .quadrature import gauss_rule
from .qmath import DeformationParam
from .tomography import Tomogram, TomogramGrid, make_grid

log = logging.getLogger("qtomo")

DEFAULTS = {
    "q": None,
    "state": "number",
    "alpha_re": 0.0,
    "alpha_im": 0.0,
    "r": 0.0,
    "phi_s": 0.0,
    "xi_re": 0.0,
    "xi_im": 0.0,
    "n": 0,
    "ntheta": 256,
    "nx": 256,
    "x_grid": "gauss",
    "gamma_max": 6,
    "trunc_eps": fock.DEFAULT_TRUNC_EPS,
    "order": None,
    "out": None,
    "format": "csv",
    "input": None,
}


@dataclass
class RunConfig:
    q: float
    state: states.StateSpec
    ntheta: int = 256
    nx: int = 256
    x_grid: str = "gauss"
    gamma_max: int = 6
    trunc_eps: float = fock.DEFAULT_TRUNC_EPS
    order: int | None = None
    out: str | None = None
    format: str = "csv"
    input: str | None = None
    explicit: frozenset = field(default_factory=frozenset, repr=False)

    def validate(self):
        DeformationParam(self.q)
        if self.ntheta < 2 or self.nx < 2:
            raise ValueError("ntheta and nx must be at least 2")
        if self.gamma_max < 0:
            raise ValueError("gamma-max must be non-negative")
        if not (self.trunc_eps > 0):
            raise ValueError("trunc-eps must be positive")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.x_grid not in ("gauss", "uniform"):
            raise ValueError("x-grid must be gauss or uniform")
        if self.order is not None and self.order < 1:
            raise ValueError("order must be positive")

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("explicit")
        out["state"] = self.state.to_dict()
        out["version"] = __version__
        return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    explicit = set()
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
        explicit.update(data)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
            explicit.add(key)
    if merged["q"] is None:
        raise ValueError("--q is required")
    spec = states.StateSpec(
        merged["state"],
        alpha=complex(merged["alpha_re"], merged["alpha_im"]),
        r=float(merged["r"]),
        phi_s=float(merged["phi_s"]),
        xi=complex(merged["xi_re"], merged["xi_im"]),
        n=int(merged["n"]),
    )
    cfg = RunConfig(
        q=float(merged["q"]),
        state=spec,
        ntheta=int(merged["ntheta"]),
        nx=int(merged["nx"]),
        x_grid=merged["x_grid"],
        gamma_max=int(merged["gamma_max"]),
        trunc_eps=float(merged["trunc_eps"]),
        order=None if merged["order"] is None else int(merged["order"]),
        out=merged["out"],
        format=merged["format"],
        input=merged["input"],
        explicit=frozenset(explicit),
    )
    cfg.validate()
    return cfg


def fmt(x: float) -> str:
    """17 significant digits: doubles survive a text round trip."""
    return format(float(x), ".17g")


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _csv(meta: dict, header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


# subcommands

def cmd_state(cfg: RunConfig) -> int:
    d = DeformationParam(cfg.q)
    s = states.build_state(cfg.state, d, cfg.trunc_eps)
    nz = np.nonzero(s.amps)[0]
    last = int(nz[-1]) if nz.size else 0
    amps = s.amps[: last + 1]
    meta = {"config": cfg.to_dict(), "cutoff": s.cutoff}
    if cfg.format == "json":
        text = _dump_json({
            "meta": meta,
            "n": list(range(last + 1)),
            "re": [float(c.real) for c in amps],
            "im": [float(c.imag) for c in amps],
            "abs2": [float(abs(c) ** 2) for c in amps],
        })
    else:
        rows = ((str(n), c.real, c.imag, abs(c) ** 2) for n, c in enumerate(amps))
        text = _csv(meta, ["n", "re", "im", "abs2"], rows)
    _emit(text, cfg.out)
    return 0


def cmd_tomogram(cfg: RunConfig) -> int:
    d = DeformationParam(cfg.q)
    grid = make_grid(cfg.state, cfg.ntheta, cfg.nx, d, x_kind=cfg.x_grid, eps_trunc=cfg.trunc_eps)
    _emit(grid_to_text(grid, cfg), cfg.out)
    return 0


def grid_to_text(grid: TomogramGrid, cfg: RunConfig) -> str:
    meta = {"config": cfg.to_dict(), "x_grid": grid.x_kind, "q": grid.d.q}
    if cfg.format == "json":
        return _dump_json({
            "meta": meta,
            "thetas": [float(t) for t in grid.thetas],
            "xs": [float(x) for x in grid.xs],
            "values": [[float(v) for v in row] for row in grid.values],
        })
    rows = (
        (t, x, grid.values[i, j])
        for i, t in enumerate(grid.thetas)
        for j, x in enumerate(grid.xs)
    )
    return _csv(meta, ["theta", "x", "omega"], rows)


def read_grid(path: str) -> TomogramGrid:
    """Load a grid written by ``qtomo tomogram`` (CSV or JSON)."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        meta = data["meta"]
        thetas = np.array(data["thetas"], dtype=float)
        xs = np.array(data["xs"], dtype=float)
        values = np.array(data["values"], dtype=float)
    else:
        first, _, rest = text.partition("\n")
        if not first.startswith("#"):
            raise IncompatibleGrid(f"{path}: missing metadata comment line")
        meta = json.loads(first[1:])
        table = np.loadtxt(io.StringIO(rest), delimiter=",", skiprows=1, ndmin=2)
        thetas = np.unique(table[:, 0])
        xs = table[: table.shape[0] // thetas.size, 1]
        if thetas.size * xs.size != table.shape[0]:
            raise IncompatibleGrid(f"{path}: rows do not form a rectangular theta x X grid")
        values = table[:, 2].reshape(thetas.size, xs.size)
    d = DeformationParam(meta["q"])
    kind = meta.get("x_grid", "uniform")
    weights = None
    if kind == "gauss":
        rule = gauss_rule(d, xs.size)
        if not np.allclose(rule.nodes, xs, rtol=0, atol=1e-12):
            raise IncompatibleGrid(f"{path}: X samples are not the Gauss nodes for q={d.q}")
        weights = np.array(rule.weights)
    return TomogramGrid(d, thetas, xs, values, kind, weights, {"file": str(path), "meta": meta})


def cmd_moments(cfg: RunConfig) -> int:
    d = DeformationParam(cfg.q)
    rule = gauss_rule(d, cfg.order) if cfg.order else None
    direct = None
    if cfg.input:
        grid = read_grid(cfg.input)
        if grid.d.q != d.q:
            raise IncompatibleGrid(f"{cfg.input}: grid has q={grid.d.q}, config has q={d.q}")
        for key, size in (("ntheta", grid.thetas.size), ("nx", grid.xs.size)):
            if key in cfg.explicit and getattr(cfg, key) != size:
                raise IncompatibleGrid(f"{cfg.input}: grid has {key}={size}, config asks for {getattr(cfg, key)}")
        if "x_grid" in cfg.explicit and cfg.x_grid != grid.x_kind:
            raise IncompatibleGrid(f"{cfg.input}: grid X sampling is {grid.x_kind}")
        source = grid
    else:
        s = states.build_state(cfg.state, d, cfg.trunc_eps)
        source = Tomogram(s)
        direct = fock.moment_table_direct(s, min(cfg.gamma_max, 2 * s.cutoff))
    report: dict = {}
    table = moment_table_from_tomogram(source, cfg.gamma_max, rule=rule, report=report)
    rows = []
    worst = 0.0
    for a, b, m in table.entries():
        row = [str(a), str(b), m.real, m.imag]
        if direct is not None:
            ref = direct[a, b] if a + b <= direct.gamma_max else 0j
            err = abs(m - ref)
            worst = max(worst, err)
            row += [ref.real, ref.imag, err]
        rows.append(row)
    meta = {"config": cfg.to_dict(), "report": report}
    if direct is not None:
        meta["max_abs_error"] = worst
    header = ["alpha", "beta", "re", "im"] + (["direct_re", "direct_im", "abs_err"] if direct is not None else [])
    if cfg.format == "json":
        text = _dump_json({"meta": meta, "columns": header, "rows": [[r if isinstance(r, str) else float(r) for r in row] for row in rows]})
    else:
        text = _csv(meta, header, rows)
    _emit(text, cfg.out)
    if direct is not None:
        log.info("max |extracted - direct| = %.3e", worst)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    qs = tuple(args.q) if args.q else (0.5, 0.7, 0.9)
    report = verify.run_all(qs, round_trips=not args.quick)
    for line in report["lines"]:
        print(line)
    for pair, score in report["janus"].items():
        print(f"[INFO] Janus pi/2 correlation {pair}: {score['score']:.4f} (best {score['best_score']:.4f} at shift {score['best_shift']:.4f})")
    print("ALL PASSED" if report["passed"] else "FAILURES PRESENT")
    if args.out:
        _emit(_dump_json({k: v for k, v in report.items() if k != "lines"}), args.out)
    return 0 if report["passed"] else 1


def _add_common(p: argparse.ArgumentParser, with_grid=False, with_moments=False):
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--q", type=float, help="deformation parameter, 0 < q < 1")
    p.add_argument("--state", choices=[k.value for k in states.Kind])
    p.add_argument("--alpha-re", type=float, dest="alpha_re")
    p.add_argument("--alpha-im", type=float, dest="alpha_im")
    p.add_argument("--r", type=float, help="squeezing strength")
    p.add_argument("--phi-s", type=float, dest="phi_s", help="squeezing phase")
    p.add_argument("--xi-re", type=float, dest="xi_re")
    p.add_argument("--xi-im", type=float, dest="xi_im")
    p.add_argument("--n", type=int, help="photon number for --state number")
    p.add_argument("--trunc-eps", type=float, dest="trunc_eps")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"])
    if with_grid:
        p.add_argument("--ntheta", type=int)
        p.add_argument("--nx", type=int)
        p.add_argument("--x-grid", choices=["gauss", "uniform"], dest="x_grid")
    if with_moments:
        p.add_argument("--gamma-max", type=int, dest="gamma_max")
        p.add_argument("--order", type=int, help="Gauss rule order for the projections")
        p.add_argument("--input", help="tomogram grid file to analyse instead of a built-in state")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qtomo", description="Tomograms and moments of q-deformed states.")
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("--version", action="version", version=f"qtomo {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("state", help="dump Fock amplitudes"))
    _add_common(sub.add_parser("tomogram", help="export a tomogram grid"), with_grid=True)
    _add_common(sub.add_parser("moments", help="extract normally ordered moments"), with_grid=True, with_moments=True)
    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("--q", type=float, action="append", help="q value to check (repeatable)")
    v.add_argument("--quick", action="store_true", help="skip the tomogram round trips")
    v.add_argument("--out", help="write the JSON report here")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.command == "verify":
            return cmd_verify(args)
        cfg = resolve_config(args)
        return {"state": cmd_state, "tomogram": cmd_tomogram, "moments": cmd_moments}[args.command](cfg)
    except (QTomoError, ValueError, OSError, KeyError) as exc:
        print(f"qtomo {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end.

Subcommands: `verify` (run a named invariant suite), `extend` and
`green` (evaluate the two potentials on a point grid, CSV/JSON out),
`constants` (the Lipschitz-constant ledger as JSON) and `lipschitz`
(difference-quotient scan report).

Output is deterministic: a fixed config and seed produce byte-identical
files.  Floats are serialized with 17 significant digits.  Boundary and
source fields come from a small built-in registry; custom fields enter
through the library API, not the CLI.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import analysis, potentials, suites
from ._sampling import sphere_points


@dataclass
class RunConfig:
    n: int = 3
    sphere_order: int = 48
    radial_order: int = 64
    margin: float = 1e-3
    fd_step: float = 1e-4
    seed: int = 2024
    format: str = "csv"
    out: str | None = None

    @classmethod
    def from_file(cls, path):
        cfg = cls()
        valid = {f.name: f.type for f in fields(cls)}
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"bad config line: {raw.strip()!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in valid:
                    raise ValueError(f"unknown config key: {key}")
                current = getattr(cfg, key)
                if isinstance(current, int) and not isinstance(current, bool):
                    setattr(cfg, key, int(value))
                elif isinstance(current, float):
                    setattr(cfg, key, float(value))
                else:
                    setattr(cfg, key, value)
        return cfg

    def to_file(self, path):
        with open(path, "w") as fh:
            for key, value in asdict(self).items():
                if value is None:
                    continue
                fh.write(f"{key} = {value!r}\n" if isinstance(value, str) else f"{key} = {value:.17g}\n"
                         if isinstance(value, float) else f"{key} = {value}\n")


def _fmt(x):
    return f"{x:.17g}"


def _load_config(args):
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    for key in ("n", "sphere_order", "radial_order", "margin", "fd_step", "seed", "format", "out"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    return cfg


# -- field and grid registries ----------------------------------------------


def boundary_field(spec, n):
    kind, _, arg = spec.partition(":")
    if kind == "constant":
        vec = np.array([float(v) for v in arg.split(",")]) if arg else np.zeros(n)
        if vec.shape[0] != n:
            raise ValueError(f"constant field needs {n} components")
        return potentials.BoundaryField(
            n=n, eval=lambda T: np.tile(vec, (T.shape[0], 1)), lipschitz_L=0.0,
            name=f"constant:{arg}",
        )
    if kind == "coordinate":
        k = int(arg or "1") - 1
        if not 0 <= k < n:
            raise ValueError("coordinate index out of range")

        def ev(T, k=k):
            out = np.zeros((T.shape[0], n))
            out[:, 0] = T[:, k]
            return out

        return potentials.BoundaryField(n=n, eval=ev, lipschitz_L=1.0, name=spec)
    if kind == "cusp":
        e1 = np.zeros(n)
        e1[0] = 1.0

        def ev(T):
            out = np.zeros((T.shape[0], n))
            out[:, 0] = np.linalg.norm(T - e1, axis=1)
            return out

        return potentials.BoundaryField(n=n, eval=ev, lipschitz_L=1.0, name="cusp")
    if kind == "fourier":
        if n != 2:
            raise ValueError("the fourier field is an n=2 diagnostic")
        terms = int(arg or "100")

        def ev(T, terms=terms):
            theta = np.arctan2(T[:, 1], T[:, 0])
            out = np.zeros((T.shape[0], 2))
            out[:, 0] = analysis.w0_boundary(theta, terms=terms)
            return out

        return potentials.BoundaryField(n=2, eval=ev, name=f"fourier:{terms}")
    raise ValueError(f"unknown boundary field: {spec!r}")


def source_field(spec, n):
    kind, _, arg = spec.partition(":")
    if kind == "zero":
        return potentials.SourceField(
            n=n, eval=lambda P: np.zeros((P.shape[0], n)), decay_M=0.0, name="zero"
        )
    if kind == "decay":

        def ev(P):
            out = np.zeros((P.shape[0], n))
            out[:, 0] = (1.0 - np.einsum("ij,ij->i", P, P)) ** n
            return out

        return potentials.SourceField(n=n, eval=ev, decay_M=1.0, name="decay")
    if kind == "manufactured":
        which = int(arg or "1")
        pair = (potentials.manufactured_linear if which == 1 else potentials.manufactured_quadratic)(n)
        return pair.psi
    raise ValueError(f"unknown source field: {spec!r}")


def grid_points(spec, n, seed):
    kind, _, arg = spec.partition(":")
    if kind == "ray":
        k, r0, r1, count = arg.split(":")
        pts = np.zeros((int(count), n))
        pts[:, int(k) - 1] = np.linspace(float(r0), float(r1), int(count))
        return pts
    if kind == "shell":
        r, count = arg.split(":")
        rng = np.random.default_rng(seed)
        return float(r) * sphere_points(rng, int(count), n)
    if kind == "origin":
        return np.zeros((1, n))
    raise ValueError(f"unknown grid spec: {spec!r}")


# -- output writers ----------------------------------------------------------


def _write_grid(path, fmt, X, values, est_error, value_prefix):
    n = X.shape[1]
    header = [f"x{i+1}" for i in range(n)] + [
        f"{value_prefix}{i+1}" for i in range(values.shape[1])
    ] + ["est_error"]
    if fmt == "csv":
        lines = [",".join(header)]
        for row, val, err in zip(X, values, est_error):
            lines.append(",".join(_fmt(v) for v in (*row, *val, err)))
        text = "\n".join(lines) + "\n"
    else:
        rows = [
            {"x": [float(_fmt(v)) for v in row],
             "value": [float(_fmt(v)) for v in val],
             "est_error": float(_fmt(err))}
            for row, val, err in zip(X, values, est_error)
        ]
        text = json.dumps({"columns": header, "rows": rows}, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands -------------------------------------------------------------


def cmd_verify(args):
    cfg = _load_config(args)
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    all_checks = []
    for name in names:
        fn = suites.SUITES[name]
        kwargs = {}
        if args.n is not None:
            if name in ("geometry", "quadrature", "kernels", "representation", "green-mass"):
                kwargs["dims"] = (cfg.n,)
            elif name in ("harmonicity", "mean-value", "du-origin", "lipschitz"):
                kwargs["n"] = cfg.n
        print(f"== suite {name}")
        for chk in fn(**kwargs):
            print(chk.line())
            all_checks.append(chk)
    failed = [c for c in all_checks if not c.passed]
    print(f"{len(all_checks) - len(failed)}/{len(all_checks)} checks passed")
    return 1 if failed else 0


def cmd_extend(args):
    cfg = _load_config(args)
    phi = boundary_field(args.phi, cfg.n)
    X = grid_points(args.grid, cfg.n, cfg.seed)
    full = potentials.poisson_extension_batch(phi, X, order=cfg.sphere_order)
    half = potentials.poisson_extension_batch(phi, X, order=max(cfg.sphere_order // 2, 4))
    est = np.max(np.abs(full - half), axis=1)
    _write_grid(cfg.out, cfg.format, X, full, est, "phi")
    return 0


def cmd_green(args):
    cfg = _load_config(args)
    psi = source_field(args.psi, cfg.n)
    X = grid_points(args.grid, cfg.n, cfg.seed)
    kw = dict(radial_order=cfg.radial_order, sphere_order=cfg.sphere_order)
    full = potentials.green_potential_batch(psi, X, **kw)
    half = potentials.green_potential_batch(
        psi, X, radial_order=max(cfg.radial_order // 2, 4),
        sphere_order=max(cfg.sphere_order // 2, 4),
    )
    est = np.max(np.abs(full - half), axis=1)
    _write_grid(cfg.out, cfg.format, X, full, est, "psi")
    return 0


def cmd_constants(args):
    cfg = _load_config(args)
    ledger = analysis.compute_constants(cfg.n, args.L, args.M).as_dict()
    text = json.dumps(ledger, indent=2, sort_keys=True, default=float) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_lipschitz(args):
    cfg = _load_config(args)
    spec = analysis.ScanSpec(n=cfg.n, pairs=args.pairs, seed=cfg.seed)
    if args.pair == "identity":
        f = lambda P: P
        consts = analysis.compute_constants(cfg.n, 1.0, 0.0)
    else:
        which = int(args.pair.partition(":")[2] or "1")
        pair = (potentials.manufactured_linear if which == 1
                else potentials.manufactured_quadratic)(cfg.n)
        consts = analysis.compute_constants(cfg.n, pair.L, pair.M)
        f = lambda P: potentials.poisson_extension_batch(
            pair.phi, P, order=min(cfg.sphere_order, 32), escalate=False
        ) - potentials.green_potential_batch(
            pair.psi, P, radial_order=min(cfg.radial_order, 24),
            sphere_order=min(cfg.sphere_order, 16),
        )
    report = analysis.lipschitz_scan(f, spec)
    payload = {
        "constants": consts.as_dict(),
        "scan": report.as_dict(),
        "within_C1": report.max_ratio <= consts.C1,
    }
    text = json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hyperball",
        description="Hyperbolic potential theory on the unit ball: kernels, "
        "potentials, constants, and verification suites.",
    )
    parser.add_argument("--config", help="key = value config file (flags override)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--sphere-order", dest="sphere_order", type=int, default=None)
        p.add_argument("--radial-order", dest="radial_order", type=int, default=None)
        p.add_argument("--margin", type=float, default=None)
        p.add_argument("--fd-step", dest="fd_step", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--out", default=None)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all", choices=["all", *suites.SUITES])
    add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("extend", help="evaluate the Poisson extension on a grid")
    p.add_argument("--phi", required=True, help="constant:c1,..|coordinate:k|cusp|fourier:K")
    p.add_argument("--grid", required=True, help="ray:k:r0:r1:count|shell:r:count|origin")
    add_common(p)
    p.set_defaults(fn=cmd_extend)

    p = sub.add_parser("green", help="evaluate the Green potential on a grid")
    p.add_argument("--psi", required=True, help="zero|decay|manufactured:1|manufactured:2")
    p.add_argument("--grid", required=True)
    add_common(p)
    p.set_defaults(fn=cmd_green)

    p = sub.add_parser("constants", help="compute the Lipschitz-constant ledger")
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--M", type=float, required=True)
    add_common(p)
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("lipschitz", help="difference-quotient scan report")
    p.add_argument("--pair", default="manufactured:1",
                   help="identity|manufactured:1|manufactured:2")
    p.add_argument("--pairs", type=int, default=20_000)
    add_common(p)
    p.set_defaults(fn=cmd_lipschitz)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

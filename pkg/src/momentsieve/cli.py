"""Batch front door: subcommands wiring the library, config loading, and
bit-stable report emission.

Reports embed the resolved mathematical configuration and a schema version.
Worker count is an execution detail, deliberately excluded from the embedded
config, so identical configurations produce identical bytes at any level of
parallelism (the reductions are fixed-chunk deterministic).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import decomposition as dc
from .apdist import discrepancy_report, moment_fg_suite
from .errors import MomentsieveError
from .functions import additive_from_config, weight_from_config
from .hypotheses import audit_weight, build_adversarial_set
from .moments import empirical_cdf, mean_A, moment_suite
from .polyroots import poly_from_coefficients
from .combinatorics import gaussian_constants
from .reductions import DEFAULT_CHUNK
from .sieve import build_sieve, factorize, primes_up_to

SCHEMA_VERSION = "1"
ENV_WORKERS = "MOMENTSIEVE_WORKERS"
_G_IDENTITY_SEED = 1728
_G_IDENTITY_SAMPLES = 200


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_json(config: dict, reports) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "config": config, "reports": reports}
    return json.dumps(doc, indent=2) + "\n"


def _report_csv(rows) -> str:
    if not rows:
        return "\n"
    cols = list(rows[0])
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _parse_orders(text: str):
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_grid(text: str):
    lo, hi, step = (float(t) for t in text.split(":"))
    n = int(round((hi - lo) / step)) + 1
    return [lo + i * step for i in range(n)]


def _weight_config(args) -> dict:
    cfg = {"name": args.weight}
    for key in ("k", "kappa", "lam", "c"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    if getattr(args, "poly", None) and args.weight == "rho_g":
        cfg["poly"] = [int(t) for t in args.poly.split(",")]
    return cfg


def _resolved_config(args, weight_cfg, additive_cfg) -> dict:
    cfg = {
        "subcommand": args.subcommand,
        "weight": weight_cfg,
        "additive": additive_cfg,
        "limit": args.limit,
        "format": args.format,
        "chunk": args.chunk,
    }
    if getattr(args, "m", None):
        cfg["m"] = _parse_orders(args.m)
    if getattr(args, "grid", None):
        cfg["grid"] = args.grid
    if getattr(args, "q", None):
        cfg["q"] = args.q
    if getattr(args, "a", None) is not None:
        cfg["a"] = args.a
    if args.subcommand == "apdist" or args.weight == "rho_g":
        cfg["poly"] = args.poly
    return cfg


def _cmd_moments(args):
    weight_cfg = _weight_config(args)
    additive_cfg = {"name": args.additive}
    weight = weight_from_config(weight_cfg)
    f = additive_from_config(additive_cfg)
    table = build_sieve(args.limit)
    reports = moment_suite(
        weight, f, args.limit, _parse_orders(args.m), table, chunk=args.chunk, workers=args.workers
    )
    config = _resolved_config(args, weight_cfg, additive_cfg)
    if args.format == "csv":
        return _report_csv([r.to_dict() for r in reports])
    return _report_json(config, [r.to_dict() for r in reports])


def _cmd_cdf(args):
    weight_cfg = _weight_config(args)
    additive_cfg = {"name": args.additive}
    weight = weight_from_config(weight_cfg)
    f = additive_from_config(additive_cfg)
    table = build_sieve(args.limit)
    grid = _parse_grid(args.grid)
    report = empirical_cdf(
        weight, f, args.limit, grid, table, chunk=args.chunk, workers=args.workers
    )
    config = _resolved_config(args, weight_cfg, additive_cfg)
    if args.format == "plot":
        lines = ["# V cdf phi"]
        for v, c, ph in zip(report.grid, report.cdf, report.phi):
            lines.append(f"{_fmt(float(v))} {_fmt(float(c))} {_fmt(float(ph))}")
        text = "\n".join(lines) + "\n"
        if args.out:
            script = (
                "import numpy as np\nimport matplotlib.pyplot as plt\n"
                f"data = np.loadtxt({os.path.basename(args.out)!r})\n"
                "plt.plot(data[:,0], data[:,1], drawstyle='steps-post', label='weighted cdf')\n"
                "plt.plot(data[:,0], data[:,2], label='gaussian')\n"
                "plt.legend(); plt.xlabel('V'); plt.show()\n"
            )
            with open(args.out + ".plot.py", "w") as fh:
                fh.write(script)
        return text
    if args.format == "csv":
        rows = [
            {"v": float(v), "cdf": float(c), "phi": float(p)}
            for v, c, p in zip(report.grid, report.cdf, report.phi)
        ]
        rows.append({"v": "ks_distance", "cdf": report.ks_distance, "phi": ""})
        return _report_csv(rows)
    return _report_json(config, [report.to_dict()])


def _cmd_validate(args):
    weight_cfg = _weight_config(args)
    weight = weight_from_config(weight_cfg)
    table = build_sieve(args.limit)
    reports = audit_weight(weight, args.limit, table)
    config = _resolved_config(args, weight_cfg, None)
    return _report_json(config, {k: r.to_dict() for k, r in reports.items()})


def _cmd_decompose(args):
    weight_cfg = _weight_config(args)
    additive_cfg = {"name": args.additive}
    weight = weight_from_config(weight_cfg)
    f = additive_from_config(additive_cfg)
    table = build_sieve(args.limit)
    m = _parse_orders(args.m)[0] if args.m else 2
    params = dc.choose_params(weight, args.limit, m, table)
    a_x = mean_A(weight, f, args.limit, table, chunk=args.chunk)
    evaluator = dc.ResidualEvaluator(weight, f, params, a_x, table)
    sample_top = min(args.limit, 10**4)
    residual_max = 0.0
    for n in range(2, sample_top + 1):
        r = abs(evaluator(n)) - dc.omega_zw(factorize(n, table), params.z, params.w)
        residual_max = max(residual_max, r)
    rng = np.random.default_rng(_G_IDENTITY_SEED)
    primes = primes_up_to(min(int(params.x ** 0.5) + 100, table.limit), table)
    pool = primes[primes > params.q0]
    worst = 0.0
    for _ in range(_G_IDENTITY_SAMPLES):
        k = int(rng.integers(1, 5))
        chosen = rng.choice(pool, size=min(k, len(pool)), replace=False)
        pairs = [(int(p), int(rng.integers(1, 4))) for p in chosen]
        worst = max(worst, abs(dc.G_closed(weight, f, pairs, table) - dc.G_expand(weight, f, pairs, table)))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": _resolved_config(args, weight_cfg, additive_cfg),
        "Q0": params.q0,
        "v": params.v,
        "z": params.z,
        "w": params.w,
        "residual_max": residual_max,
        "G_identity_max_error": worst,
    }
    return json.dumps(doc, indent=2) + "\n"


def _cmd_apdist(args):
    weight_cfg = _weight_config(args)
    additive_cfg = {"name": args.additive}
    weight = weight_from_config(weight_cfg)
    f = additive_from_config(additive_cfg)
    coeffs = [int(t) for t in args.poly.split(",")]
    g = poly_from_coefficients(coeffs)
    table = build_sieve(args.limit)
    reports = [
        r.to_dict()
        for r in moment_fg_suite(
            weight, f, g, args.limit, _parse_orders(args.m), table, chunk=args.chunk, workers=args.workers
        )
    ]
    payload = {"g": coeffs, "q": args.q, "a": args.a, "moments": reports}
    if args.q:
        dr = discrepancy_report(weight, args.limit, args.q, table, chunk=args.chunk)
        payload["discrepancy"] = dr.to_dict()
    config = _resolved_config(args, weight_cfg, additive_cfg)
    if args.format == "csv":
        return _report_csv(reports)
    return _report_json(config, payload)


def _cmd_counterexample(args):
    table = build_sieve(args.limit)
    adv = build_adversarial_set(args.limit, table)
    rows = [
        {
            "p_considered": int(p),
            "included": int(inc),
            "s_P": float(s),
            "u": float(u),
        }
        for p, inc, s, u in zip(adv.trace_p, adv.trace_included, adv.trace_s, adv.trace_u)
    ]
    if args.format == "json":
        config = {"subcommand": "counterexample", "limit": args.limit}
        return _report_json(config, rows)
    return _report_csv(rows)


def _cmd_predict(args):
    weight_cfg = _weight_config(args)
    additive_cfg = {"name": args.additive}
    weight = weight_from_config(weight_cfg)
    f = additive_from_config(additive_cfg)
    table = build_sieve(args.limit)
    from .moments import variance_B

    b = variance_B(weight, f, args.limit, table, chunk=args.chunk)
    rows = []
    for m in _parse_orders(args.m):
        g = gaussian_constants(m) if m >= 1 else None
        rows.append(
            {
                "m": m,
                "b_x": b,
                "predicted": 1.0 if m == 0 else float(g.coefficient) * b ** (m / 2) * g.parity,
                "gaussian_moment": 1.0 if m == 0 else float(g.moment),
            }
        )
    config = _resolved_config(args, weight_cfg, additive_cfg)
    if args.format == "csv":
        return _report_csv(rows)
    return _report_json(config, rows)


_COMMANDS = {
    "moments": _cmd_moments,
    "cdf": _cmd_cdf,
    "validate": _cmd_validate,
    "decompose": _cmd_decompose,
    "apdist": _cmd_apdist,
    "counterexample": _cmd_counterexample,
    "predict": _cmd_predict,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="momentsieve")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--weight", default="one")
        p.add_argument("--additive", default="omega")
        p.add_argument("--limit", type=int, default=10**5)
        p.add_argument("--m", default="1,2,3,4")
        p.add_argument("--grid", default="-3:3:0.25")
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--kappa", type=float, default=None)
        p.add_argument("--lam", type=float, default=None)
        p.add_argument("--c", type=float, default=None)
        p.add_argument("--poly", default="1,0,1")
        p.add_argument("--q", type=int, default=None)
        p.add_argument("--a", type=int, default=None)
        p.add_argument("--format", choices=("json", "csv", "plot"), default="json")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--chunk", type=int, default=DEFAULT_CHUNK)
        p.add_argument("--out", default=None)
        p.add_argument("--config", default=None)
    return parser


def _apply_config_file(args):
    """Config file values override flags."""
    if not args.config:
        return args
    with open(args.config) as fh:
        cfg = json.load(fh)
    for key, value in cfg.items():
        if key == "weight" and isinstance(value, dict):
            args.weight = value.get("name", args.weight)
            for k in ("k", "kappa", "lam", "c"):
                if k in value:
                    setattr(args, k, value[k])
            if "poly" in value:
                args.poly = ",".join(str(c) for c in value["poly"])
        elif key == "additive" and isinstance(value, dict):
            args.additive = value.get("name", args.additive)
        elif hasattr(args, key):
            setattr(args, key, value)
    return args


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args = _apply_config_file(args)
    if args.workers is None:
        args.workers = int(os.environ.get(ENV_WORKERS, "1"))
    if args.limit < 16:
        print("error: limit must be at least 16", file=sys.stderr)
        return 2
    if args.chunk < 1 or args.chunk & (args.chunk - 1):
        print("error: chunk must be a power of two", file=sys.stderr)
        return 2
    try:
        text = _COMMANDS[args.subcommand](args)
    except MomentsieveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

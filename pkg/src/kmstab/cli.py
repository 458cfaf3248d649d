"""Command-line entry point.

Exit codes: 0 success or stable, 1 error, 2 region not stable, 3 an
assumption of the initialization analysis is violated.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .certify import (
    RegionSpec,
    certify,
    check_assumptions,
    compute_init_params,
    containment_oracle,
    impurity_bound,
    purity_radii,
)
from .datasets import NAMED_MODELS, MixtureModel, generate_dataset, named_model, write_csv
from .errors import AssumptionViolation, KMStabError
from .gmm1d import GaussianMixture1D
from .seeding import InitScheme, init_params_for
from .stability import MODES, ProtocolSpec, run_protocol, write_reports

EXIT_OK, EXIT_ERROR, EXIT_UNSTABLE, EXIT_ASSUMPTION = 0, 1, 2, 3
OUTPUT_DIR_ENV = "KMSTAB_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for "unstable".
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def output_dir(explicit: str | None = None) -> Path:
    return Path(explicit or os.environ.get(OUTPUT_DIR_ENV) or ".")


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part.strip()[1:]:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def _span(text: str) -> np.ndarray:
    """``start:stop:num`` as a linspace, or a single value."""
    parts = text.split(":")
    if len(parts) == 1:
        return np.array([float(parts[0])])
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:num, got {text!r}")
    return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    seed = int(np.random.SeedSequence().entropy % (2**63))
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment; keys use flag names."""
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


# ------------------------------------------------------------------ certify


def cmd_certify(args) -> int:
    kind = "square_k2" if args.k2 else ("prism_k3_mirrored" if args.mirrored else "prism_k3")
    region = RegionSpec(kind, args.a, args.b or 0.0, args.eps or 0.0)
    cert = certify(region, args.w1, args.delta, args.mode)
    result = {"region": {"kind": kind, "a": args.a, "b": args.b, "epsilon": args.eps}, "w1": args.w1, "delta": args.delta}
    result.update(cert.to_dict())
    if args.oracle:
        orc = containment_oracle(GaussianMixture1D.two_component(args.w1, args.delta), region, args.grid)
        result["oracle"] = {
            "contained": orc.contained,
            "witness": None if orc.witness is None else orc.witness.tolist(),
            "n_checked": orc.n_checked,
        }
    _emit(result, args.out)
    return EXIT_OK if cert.stable else EXIT_UNSTABLE


# ------------------------------------------------------------------ init-params


def _implied_mixture(w_min: float, delta: float, K: int, weights: list[float] | None) -> GaussianMixture1D:
    if weights is None:
        rest = 1.0 - (K - 1) * w_min
        weights = [w_min] * (K - 1) + [rest]
    if len(weights) != K:
        raise ValueError(f"--weights has {len(weights)} entries, expected K={K}")
    return GaussianMixture1D(weights, [k * delta for k in range(K)])


def cmd_init_params(args) -> int:
    K = args.K if args.K is not None else max(2, math.floor(1.0 / args.wmin + 1e-12))
    params = compute_init_params(args.wmin, args.delta, args.dmiss, args.tau, args.delta_max)
    out: dict = {"K": K, "params": params.to_dict(), "delta_thresh": params.delta_thresh}
    violated = False
    try:
        m = _implied_mixture(args.wmin, args.delta, K, _floats(args.weights) if args.weights else None)
    except KMStabError as exc:
        m = None
        out["mixture_error"] = str(exc)
        violated = True
    if m is not None:
        out["mixture"] = {"weights": list(m.weights), "means": list(m.means)}
        imp = []
        for k in range(m.K - 1):
            try:
                ib = impurity_bound(m.weights[k], m.weights[k + 1], m.means[k + 1] - m.means[k], params.tau, params.p0, params.L)
                imp.append(ib.to_dict())
            except AssumptionViolation as exc:
                imp.append({"error": str(exc)})
        out["impurity"] = imp
        try:
            out["purity"] = purity_radii(m, params).to_dict()
        except (KMStabError, OverflowError) as exc:
            out["purity"] = {"error": str(exc)}
        checks = check_assumptions(m, params)
        out["assumptions"] = [{"id": c.id, "holds": c.holds, "slack": c.slack} for c in checks]
        violated = not all(c.holds for c in checks)
    out["all_assumptions_hold"] = not violated
    _emit(out, args.out)
    return EXIT_ASSUMPTION if violated else EXIT_OK


# ------------------------------------------------------------------ dataset


def _model_from_args(args) -> MixtureModel:
    if args.model == "gmm1d":
        return MixtureModel.from_gmm1d(GaussianMixture1D(_floats(args.weights), _floats(args.means), args.sigma))
    return named_model(args.model)


def cmd_dataset(args) -> int:
    seed = resolve_seed(args.seed)
    model = _model_from_args(args)
    ds = generate_dataset(model, args.n, np.random.default_rng(seed))
    path = Path(args.out) if args.out else output_dir() / f"dataset_{model.name}_n{args.n}_s{seed}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_csv(ds, path)
    print(json.dumps({"path": str(path), "model": model.to_dict(), "n": args.n, "seed": seed}))
    return EXIT_OK


# ------------------------------------------------------------------ experiment

EXPERIMENT_DEFAULTS = {
    "model": "balanced2d",
    "weights": "0.5,0.5",
    "means": "0,7",
    "sigma": "1.0",
    "modes": "all",
    "kprimes": "2-10",
    "reps": "100",
    "n": "100",
    "init": "pruned",
    "restarts": "1",
    "dmiss": "0.02",
    "tau": "0.015",
    "normalize": "false",
    "seed": None,
    "out_dir": None,
}
_BOOL = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def _merge_experiment(args) -> dict:
    cfg = read_config(args.config) if args.config else {}
    unknown = set(cfg) - set(EXPERIMENT_DEFAULTS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    merged = {}
    for key, default in EXPERIMENT_DEFAULTS.items():
        flag = getattr(args, key)
        merged[key] = flag if flag is not None else cfg.get(key, default)
    return merged


def cmd_experiment(args) -> int:
    o = _merge_experiment(args)
    seed = resolve_seed(None if o["seed"] is None else int(o["seed"]))
    if o["model"] == "gmm1d":
        model = MixtureModel.from_gmm1d(GaussianMixture1D(_floats(o["weights"]), _floats(o["means"]), float(o["sigma"])))
    else:
        model = named_model(o["model"])
    modes = list(MODES) if o["modes"] == "all" else [m.strip() for m in o["modes"].split(",")]
    kind = o["init"]
    params = init_params_for(model, float(o["dmiss"]), float(o["tau"])) if kind == "pruned" else None
    scheme = InitScheme(kind, params=params)
    normalize = o["normalize"] if isinstance(o["normalize"], bool) else _BOOL[str(o["normalize"]).lower()]
    reports = []
    for mode in modes:
        spec = ProtocolSpec(
            mode, int(o["reps"]), int(o["n"]), tuple(_ints(str(o["kprimes"]))), scheme, int(o["restarts"]), seed, normalize
        )
        reports.append(run_protocol(model, spec))
    out = output_dir(o["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    stem = f"stability_{model.name}_{kind}_s{seed}"
    write_reports(reports, out / f"{stem}.csv", out / f"{stem}.json")
    print(f"{'mode':<20}{'K':>4}{'instab':>10}{'good':>8}{'cross':>8}{'fail':>6}")
    for rep in reports:
        for r in rep.results:
            print(f"{rep.mode:<20}{r.k_prime:>4}{r.instability:>10.4f}{r.good_init_fraction:>8.3f}{r.mean_crossings:>8.2f}{r.failures:>6}")
    print(f"wrote {out / stem}.csv and .json")
    return EXIT_OK


# ------------------------------------------------------------------ region-scan


def cmd_region_scan(args) -> int:
    w1s, deltas, As = _span(args.w1), _span(args.delta), _span(args.a)
    path = Path(args.out) if args.out else output_dir() / f"region_scan_{'k2' if args.k2 else 'k3'}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    kind = "square_k2" if args.k2 else "prism_k3"
    n_stable = 0
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["w1", "delta", "a", "b", "epsilon", "stable", "min_slack"])
        for w1 in w1s:
            for d in deltas:
                for a in As:
                    region = RegionSpec(kind, float(a), args.b or 0.0, args.eps or 0.0)
                    c = certify(region, float(w1), float(d), args.mode)
                    n_stable += c.stable
                    w.writerow([repr(float(w1)), repr(float(d)), repr(float(a)), args.b, args.eps, int(c.stable), repr(c.min_slack)])
    print(json.dumps({"path": str(path), "points": len(w1s) * len(deltas) * len(As), "stable": n_stable}))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kmstab", description="Stable regions, initialization and stability of k-means.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("certify", help="evaluate a stable-region certificate")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--k2", action="store_true", help="square region, two centers")
    g.add_argument("--k3", action="store_true", help="prism region, three centers")
    c.add_argument("--w1", type=float, required=True)
    c.add_argument("--delta", type=float, required=True, help="mean gap in units of sigma")
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--b", type=float)
    c.add_argument("--eps", type=float)
    c.add_argument("--mirrored", action="store_true", help="prism with two centers at the second mean")
    c.add_argument("--mode", choices=["corrected", "as_printed"], default="corrected")
    c.add_argument("--oracle", action="store_true", help="also run the grid containment check")
    c.add_argument("--grid", type=int, default=21)
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    ip = sub.add_parser("init-params", help="sample size, pruning threshold and assumption checks")
    ip.add_argument("--wmin", type=float, required=True)
    ip.add_argument("--delta", type=float, required=True)
    ip.add_argument("--dmiss", type=float, default=0.02)
    ip.add_argument("--tau", type=float, default=0.015)
    ip.add_argument("--delta-max", type=float)
    ip.add_argument("--K", type=int, help="number of components (default max(2, floor(1/wmin)))")
    ip.add_argument("--weights", help="comma-separated component weights of the checked mixture")
    ip.add_argument("--out")
    ip.set_defaults(func=cmd_init_params)

    d = sub.add_parser("dataset", help="sample a synthetic dataset to CSV")
    d.add_argument("--model", choices=[*NAMED_MODELS, "gmm1d"], default="balanced2d")
    d.add_argument("--weights", default="0.5,0.5")
    d.add_argument("--means", default="0,7")
    d.add_argument("--sigma", type=float, default=1.0)
    d.add_argument("--n", type=int, default=100)
    d.add_argument("--seed", type=int)
    d.add_argument("--out")
    d.set_defaults(func=cmd_dataset)

    e = sub.add_parser("experiment", help="stability curves over a range of K'")
    e.add_argument("--config", help="key = value file; flags override it")
    e.add_argument("--model", choices=[*NAMED_MODELS, "gmm1d"])
    e.add_argument("--weights")
    e.add_argument("--means")
    e.add_argument("--sigma")
    e.add_argument("--modes", help=f"comma list from {', '.join(MODES)}, or all")
    e.add_argument("--kprimes", help="e.g. 2-10 or 2,3,5")
    e.add_argument("--reps")
    e.add_argument("--n")
    e.add_argument("--init", choices=["uniform", "deterministic", "mindiam", "pruned"])
    e.add_argument("--restarts")
    e.add_argument("--dmiss")
    e.add_argument("--tau")
    e.add_argument("--normalize", action="store_const", const=True)
    e.add_argument("--seed", type=int)
    e.add_argument("--out-dir")
    e.set_defaults(func=cmd_experiment)

    r = sub.add_parser("region-scan", help="grid sweep of a certificate, written as CSV")
    g = r.add_mutually_exclusive_group(required=True)
    g.add_argument("--k2", action="store_true")
    g.add_argument("--k3", action="store_true")
    r.add_argument("--w1", default="0.05:0.95:19", help="start:stop:num or a value")
    r.add_argument("--delta", default="1:15:29")
    r.add_argument("--a", default="2.5")
    r.add_argument("--b", type=float)
    r.add_argument("--eps", type=float)
    r.add_argument("--mode", choices=["corrected", "as_printed"], default="corrected")
    r.add_argument("--out")
    r.set_defaults(func=cmd_region_scan)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KMStabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

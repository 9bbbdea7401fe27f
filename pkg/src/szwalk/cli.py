"""Command-line harness.

One entry point with subcommands:

  qht     coherent hitting-time curve with its closed-form bound
  dqht    noise-averaged hitting time at one p or a p-grid sweep
  detect  marked-set detection campaign
  verify  invariant suite on small fixtures (negative control via --corrupt)
  bounds  spectral bound report for a (graph, marked set, p) triple

Configuration comes from flags, optionally layered over a JSON config file
(flags win).  Exit codes: 0 success, 1 a stated guarantee or invariant
failed, 2 configuration error.  All artifacts are deterministic in
(config, seed) and embed the resolved config.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .detection import run_detection_campaign
from .graphs import (
    MarkedSet,
    TransitionMatrix,
    apply_marking,
    build_transition_matrix,
    generate_graph,
)
from .hitting import coherent_qht, decoherent_F_curve, decoherent_qht, g_term_decomposition
from .percolation import (
    EXACT_ENUMERATION_CAP,
    EnumerationCapError,
    PercolationModel,
    averaged_operator,
    verify_lemma1,
)
from .serialize import stamped, write_csv, write_json
from .spectral import (
    BoundInfiniteError,
    block_structure_deviation,
    bound_report,
    detection_bound,
    spectral_data,
)
from .walk import build_walk_operator, initial_state

VARIANT_FLAGS = {"bond-flip": "bond_flip", "removal": "removal_only"}

_CONFIG_KEYS = (
    "graph",
    "marked",
    "p",
    "p_grid",
    "variant",
    "mode",
    "samples",
    "seed",
    "t_cap",
    "enum_cap",
    "out",
)


class ConfigError(Exception):
    """Unusable configuration; maps to exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved experiment parameters.

    Round-trips losslessly through JSON apart from 'out':
    from_json_dict(to_json_dict(c)) equals c with out reset to '.'.
    Config files use the same keys and internal variant names.
    """

    graph: str
    marked: tuple = ()
    p: float | None = None
    p_grid: tuple | None = None
    variant: str = "bond_flip"
    mode: str = "exact"
    samples: int = 10**4
    seed: int = 0
    t_cap: int | None = None
    enum_cap: int = EXACT_ENUMERATION_CAP
    out: str = "."

    def __post_init__(self):
        if self.variant not in VARIANT_FLAGS.values():
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.mode not in ("exact", "mc"):
            raise ConfigError(f"mode must be 'exact' or 'mc', got {self.mode!r}")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.p is not None and self.p_grid is not None:
            raise ConfigError("--p and --p-grid are mutually exclusive")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"p must be in [0, 1], got {self.p!r}")

    def to_json_dict(self) -> dict:
        # 'out' is deliberately omitted: artifacts must not vary with the
        # directory they are written to
        return {
            "graph": self.graph,
            "marked": list(self.marked),
            "p": self.p,
            "p_grid": None if self.p_grid is None else list(self.p_grid),
            "variant": self.variant,
            "mode": self.mode,
            "samples": self.samples,
            "seed": self.seed,
            "t_cap": self.t_cap,
            "enum_cap": self.enum_cap,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - set(_CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "graph" not in data:
            raise ConfigError("config needs a 'graph' entry")
        kwargs = dict(data)
        if "marked" in kwargs:
            kwargs["marked"] = tuple(kwargs["marked"])
        if kwargs.get("p_grid") is not None:
            kwargs["p_grid"] = tuple(kwargs["p_grid"])
        return cls(**kwargs)


def parse_marked(text: str, n: int) -> tuple:
    """Parse '--marked' values: '' or 'none', 'first:m', or '0,1,...'."""
    text = text.strip()
    if text in ("", "none"):
        return ()
    if text.startswith("first:"):
        try:
            m = int(text[len("first:"):])
        except ValueError as exc:
            raise ConfigError(f"bad marked spec {text!r}") from exc
        if not 0 <= m <= n:
            raise ConfigError(f"first:{m} out of range for n={n}")
        return tuple(range(m))
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad marked spec {text!r}") from exc


def parse_p_grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--p-grid wants A:STEP:B, got {text!r}")
    try:
        a, step, b = (float(tok) for tok in parts)
    except ValueError as exc:
        raise ConfigError(f"--p-grid wants numbers, got {text!r}") from exc
    if step <= 0 or b < a:
        raise ConfigError(f"--p-grid needs STEP > 0 and B >= A, got {text!r}")
    return (a, step, b)


def grid_values(grid: tuple) -> list:
    """Inclusive arithmetic grid, tolerant of float endpoint rounding."""
    a, step, b = grid
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + k * step for k in range(count)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="szwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("qht", "coherent hitting-time curve"),
        ("dqht", "noise-averaged hitting time (single p or sweep)"),
        ("detect", "marked-set detection campaign"),
        ("verify", "invariant suite on small fixtures"),
        ("bounds", "spectral bound report"),
    ):
        sp = sub.add_parser(name, help=blurb)
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--graph", help="complete:N | cycle:N | file:PATH")
        sp.add_argument("--marked", help="comma list of vertices, 'first:m', or 'none'")
        noise = sp.add_mutually_exclusive_group()
        noise.add_argument("--p", type=float, help="noise probability")
        noise.add_argument("--p-grid", dest="p_grid", help="A:STEP:B inclusive sweep")
        sp.add_argument("--variant", choices=sorted(VARIANT_FLAGS), help="noise variant")
        sp.add_argument("--mode", choices=["exact", "mc"], help="averaging mode")
        sp.add_argument("--samples", type=int, help="MC samples / detection trials")
        sp.add_argument("--seed", type=int, help="base RNG seed")
        sp.add_argument("--tcap", dest="t_cap", type=int, help="max steps T")
        sp.add_argument("--out", help="output directory")
        if name == "verify":
            sp.add_argument(
                "--corrupt",
                action="store_true",
                help="inject a corrupted stochastic matrix as a negative control",
            )
    return parser


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Layer flag values over an optional config file."""
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            file_data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        config = ExperimentConfig.from_json_dict(file_data)
    else:
        if args.graph is None:
            if args.command != "verify":
                raise ConfigError("--graph is required (or provide --config)")
            # verify runs a fixed fixture set; the graph field is unused
            args.graph = "complete:3"
        config = ExperimentConfig(graph=args.graph)
    overrides = {}
    if args.graph is not None:
        overrides["graph"] = args.graph
    if args.p is not None:
        overrides["p"] = args.p
        overrides["p_grid"] = None
    if args.p_grid is not None:
        overrides["p_grid"] = parse_p_grid(args.p_grid)
        overrides["p"] = None
    if args.variant is not None:
        overrides["variant"] = VARIANT_FLAGS[args.variant]
    if args.mode is not None:
        overrides["mode"] = args.mode
    if args.samples is not None:
        overrides["samples"] = args.samples
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.t_cap is not None:
        overrides["t_cap"] = args.t_cap
    if args.out is not None:
        overrides["out"] = args.out
    if overrides:
        config = replace(config, **overrides)
    if args.marked is not None:
        n = generate_graph(config.graph).n
        config = replace(config, marked=parse_marked(args.marked, n))
    return config


def _setting(config: ExperimentConfig):
    """Common unpacking: graph, transition matrix, marked set."""
    g = generate_graph(config.graph)
    P = build_transition_matrix(g)
    try:
        M = MarkedSet(config.marked, g.n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return g, P, M


def _outdir(config: ExperimentConfig) -> Path:
    path = Path(config.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _t_star_cell(T_star):
    return "not reached" if T_star is None else T_star


def cmd_qht(config: ExperimentConfig, args) -> int:
    g, P, M = _setting(config)
    report = coherent_qht(P, M, T_cap=config.t_cap)
    out = _outdir(config)
    rows = [
        (T, F, report.threshold, bool(F >= report.threshold))
        for T, F in enumerate(report.F_curve)
    ]
    write_csv(out / "qht_curve.csv", ["T", "F", "threshold", "crossed"], rows)
    summary = {
        "n": g.n,
        "m": M.m,
        "threshold": report.threshold,
        "T_star": _t_star_cell(report.T_star),
        "T_max": report.T_max,
        "szegedy_bound": report.bound,
        "within_bound": report.within_bound,
    }
    write_json(out / "qht_summary.json", stamped(summary, config.to_json_dict()))
    print(f"qht: T_star = {_t_star_cell(report.T_star)}, bound = {report.bound}")
    if report.bound is not None and not report.within_bound:
        print("qht: guarantee failed: no crossing within the bound", file=sys.stderr)
        return 1
    return 0


def cmd_dqht(config: ExperimentConfig, args) -> int:
    g, P, M = _setting(config)
    if config.p is None and config.p_grid is None:
        raise ConfigError("dqht needs --p or --p-grid")
    ps = [config.p] if config.p is not None else grid_values(config.p_grid)
    rows = []
    reports = []
    failed = False
    for p in ps:
        model = PercolationModel(g, p, config.variant)
        report = decoherent_qht(
            model,
            M,
            mode=config.mode,
            T_cap=config.t_cap,
            samples=config.samples,
            seed=config.seed,
        )
        rows.append(
            (
                p,
                _t_star_cell(report.T_star),
                report.bound,
                report.within_threshold,
                report.within_bound,
            )
        )
        reports.append(
            {
                "p": p,
                "T_star": _t_star_cell(report.T_star),
                "dqht_bound": report.bound,
                "within_threshold": report.within_threshold,
                "within_bound": report.within_bound,
                "operator_mode": report.operator_mode,
            }
        )
        if report.within_threshold and report.within_bound is False:
            failed = True
    out = _outdir(config)
    write_csv(
        out / "dqht_sweep.csv",
        ["p", "T_star", "dqht_bound", "within_threshold", "within_bound"],
        rows,
    )
    summary = {"n": g.n, "m": M.m, "rows": reports}
    write_json(out / "dqht_summary.json", stamped(summary, config.to_json_dict()))
    for row in reports:
        print(
            "dqht: p = {p}, T_star = {T_star}, bound = {dqht_bound}, "
            "within_threshold = {within_threshold}".format(**row)
        )
    if failed:
        print("dqht: guarantee failed below threshold", file=sys.stderr)
        return 1
    return 0


def cmd_detect(config: ExperimentConfig, args) -> int:
    g, P, M = _setting(config)
    if config.p_grid is not None:
        raise ConfigError("detect runs at a single p; use --p")
    p = 0.0 if config.p is None else config.p
    model = PercolationModel(g, p, config.variant)
    if config.t_cap is not None:
        T = config.t_cap
    elif M.m >= 1:
        T = math.ceil(detection_bound(spectral_data(P, M), model.a_c, p))
    else:
        raise ConfigError("detect with an empty marked set needs --tcap")
    campaign = run_detection_campaign(model, M, T, trials=config.samples, seed=config.seed)
    out = _outdir(config)
    write_json(out / "detect_report.json", stamped(campaign.to_json_dict(), config.to_json_dict()))
    print(
        f"detect: T = {T}, frac_outcome1 = {campaign.frac_outcome1}, "
        f"mean_p1 = {campaign.mean_p1}, guarantee = {campaign.guarantee}, "
        f"pass = {campaign.passed}"
    )
    return 0 if campaign.passed else 1


def _verify_checks(corrupt: bool) -> list:
    """Invariant checks on the standard fixtures; one dict per check."""
    checks = []

    def add(check, fixture, deviation, tolerance):
        checks.append(
            {
                "check": check,
                "fixture": fixture,
                "deviation": float(deviation),
                "tolerance": tolerance,
                "pass": bool(deviation <= tolerance),
            }
        )

    fixtures = ["complete:3", "complete:4", "cycle:5"]
    for spec in fixtures:
        g = generate_graph(spec)
        P = build_transition_matrix(g)
        eye = np.eye(g.n * g.n)
        for M in (MarkedSet((), g.n), MarkedSet((0,), g.n)):
            tag = f"{spec} m={M.m}"
            op = build_walk_operator(apply_marking(P, M))
            add("walk operator orthogonal", tag, np.abs(op.U.T @ op.U - eye).max(), 1e-10)
            add("reflection RA involutive", tag, np.abs(op.RA @ op.RA - eye).max(), 1e-10)
            add("reflection RB involutive", tag, np.abs(op.RB @ op.RB - eye).max(), 1e-10)
            add("A isometry", tag, np.abs(op.A.T @ op.A - np.eye(g.n)).max(), 1e-10)
            add("B isometry", tag, np.abs(op.B.T @ op.B - np.eye(g.n)).max(), 1e-10)
        psi0 = initial_state(P).amplitudes
        op0 = build_walk_operator(P)
        add("unmarked walk fixes start", spec, np.linalg.norm(op0.U @ psi0 - psi0), 1e-10)
        add(
            "marked block structure",
            f"{spec} m=1",
            block_structure_deviation(P, MarkedSet((0,), g.n)),
            1e-12,
        )
    k3 = generate_graph("complete:3")
    for variant in ("bond_flip", "removal_only"):
        model = PercolationModel(k3, 0.3, variant)
        dev = verify_lemma1(model, MarkedSet((0,), 3), t=2, T=2)
        add(f"sequence-average factorization ({variant})", "complete:3 p=0.3", dev, 1e-12)
    model = PercolationModel(k3, 0.3, "bond_flip")
    M1 = MarkedSet((0,), 3)
    P3 = build_transition_matrix(k3)
    ubar = averaged_operator(model, M1, mode="exact")
    T = 6
    gt = g_term_decomposition(ubar, P3, M1, T)
    F = decoherent_F_curve(ubar, P3, T)[T]
    identity_dev = abs(F - (2.0 - 2.0 * (gt.G_M + gt.G_MMbot + gt.G_Mbot)))
    add("F identity from G terms", "complete:3 p=0.3", identity_dev, 1e-10)
    add("G_M below epsilon", "complete:3 p=0.3", max(gt.G_M - gt.epsilon, 0.0), 1e-10)
    if corrupt:
        bad = build_transition_matrix(k3).entries.copy()
        bad[0, 0] += 1e-3
        try:
            TransitionMatrix(bad)
        except ValueError as exc:
            checks.append(
                {
                    "check": "corrupted matrix rejected (negative control)",
                    "fixture": "complete:3 (corrupted)",
                    "pass": False,
                    "violated": str(exc),
                }
            )
        else:
            checks.append(
                {
                    "check": "corrupted matrix rejected (negative control)",
                    "fixture": "complete:3 (corrupted)",
                    "pass": False,
                    "violated": "corruption was not detected by validation",
                }
            )
    return checks


def cmd_verify(config: ExperimentConfig, args) -> int:
    checks = _verify_checks(corrupt=getattr(args, "corrupt", False))
    ok = all(c["pass"] for c in checks)
    out = _outdir(config)
    payload = {"checks": checks, "all_pass": ok}
    write_json(out / "verify_report.json", stamped(payload, config.to_json_dict()))
    for c in checks:
        status = "ok " if c["pass"] else "FAIL"
        detail = c.get("violated") or f"deviation {c.get('deviation')}"
        print(f"verify: {status} {c['check']} [{c['fixture']}]: {detail}")
    print(f"verify: {'all checks passed' if ok else 'checks failed'}")
    return 0 if ok else 1


def cmd_bounds(config: ExperimentConfig, args) -> int:
    g, P, M = _setting(config)
    if M.m == 0:
        raise ConfigError("bounds need a nonempty marked set")
    if config.p_grid is not None:
        raise ConfigError("bounds run at a single p; use --p")
    p = 0.0 if config.p is None else config.p
    model = PercolationModel(g, p, config.variant)
    report = bound_report(spectral_data(P, M), model.a_c, p)
    out = _outdir(config)
    write_json(out / "bounds_report.json", stamped(report.to_json_dict(), config.to_json_dict()))
    print(
        f"bounds: szegedy_bound = {report.szegedy_bound}, "
        f"p_threshold = {report.p_threshold}, dqht_bound = {report.dqht_bound}"
    )
    return 0


_HANDLERS = {
    "qht": cmd_qht,
    "dqht": cmd_dqht,
    "detect": cmd_detect,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        return _HANDLERS[args.command](config, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except EnumerationCapError as exc:
        print(f"configuration error: {exc} (use --mode mc)", file=sys.stderr)
        return 2
    except BoundInfiniteError as exc:
        print(f"bound unavailable: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

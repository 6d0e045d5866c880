"""Command-line entry point: figure data, time evolution, validation and scans.

All output is CSV (17 significant digits, ``\\n`` line endings).  When
``--out`` is given, the effective configuration is also written to
``<out>.meta`` as sorted ``key=value`` lines.

Exit codes: 0 success, 1 validation failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .analytic import Outcome, average_concurrence, concurrence_closed, prob_closed
from .model import ModelParams
from .oracle import ComparisonReport, max_infidelity, rwa_scan, scan_ratio

FIDELITY_TOL = 1e-9
NORM_TOL = 1e-10
# |P numeric - P closed| <= PROB_DELTA_SCALE * g/omega_m; baseline run gave 0.242 at ratio 15
PROB_DELTA_SCALE = 0.3

EVOLVE_HEADER = "tau,P1,P2,C1,C2,C_ave"
CONCURRENCE_HEADER = "tau,C1,P1,C2,P2"
AVERAGE_HEADER = "tau,C_ave"
VALIDATE_HEADER = "ratio,tau,f_exact_chain,f_rwa_analytic,f_exact_analytic,dP,dC,leakage"
SCAN_HEADER = "ratio,c_ave_max,tau_at_max,infidelity"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    ratio: float = 15.0
    xi_over_omega_m: float = 0.5
    tau_max: float = 3 * math.pi
    steps: int = 400
    n_b: int = 12
    omega_c_over_g: float = 0.0
    out_path: Path | None = None
    format: str = "csv"
    ratios: tuple[float, ...] = field(default=(10.0, 15.0, 30.0))

    def check(self) -> None:
        if not self.ratio >= 2:
            raise ConfigError(f"ratio must be >= 2, got {self.ratio}")
        if any(not r >= 2 for r in self.ratios):
            raise ConfigError(f"all ratios must be >= 2, got {self.ratios}")
        if self.steps < 2:
            raise ConfigError(f"steps must be >= 2, got {self.steps}")
        if self.n_b < 4:
            raise ConfigError(f"nb must be >= 4, got {self.n_b}")
        if not self.tau_max > 0:
            raise ConfigError(f"tau-max must be positive, got {self.tau_max}")
        if self.xi_over_omega_m < 0:
            raise ConfigError(f"xi-ratio must be non-negative, got {self.xi_over_omega_m}")
        if self.omega_c_over_g < 0:
            raise ConfigError(f"omega-c must be non-negative, got {self.omega_c_over_g}")
        if self.format != "csv":
            raise ConfigError(f"unsupported format {self.format!r}")

    def params(self, ratio: float | None = None) -> ModelParams:
        return ModelParams.from_ratio(
            self.ratio if ratio is None else ratio,
            xi_over_omega_m=self.xi_over_omega_m,
            omega_c=self.omega_c_over_g,
        )

    def taus(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, self.steps)

    def require_resonance(self) -> None:
        if abs(self.xi_over_omega_m - 0.5) > 1e-9:
            raise ConfigError("the closed form needs --xi-ratio 0.5 (omega_m = 2 xi)")


def fmt(x: float | None) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".17g")


def csv_text(header: str, rows) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _meta_items(cfg: RunConfig, command: str) -> dict[str, str]:
    items = {
        "command": command,
        "ratio": fmt(cfg.ratio),
        "xi_ratio": fmt(cfg.xi_over_omega_m),
        "tau_max": fmt(cfg.tau_max),
        "steps": str(cfg.steps),
        "nb": str(cfg.n_b),
        "omega_c": fmt(cfg.omega_c_over_g),
        "format": cfg.format,
    }
    if command in ("validate", "scan"):
        items["ratios"] = ";".join(fmt(r) for r in cfg.ratios)
    return items


def emit(cfg: RunConfig, command: str, text: str, stdout=None) -> None:
    if cfg.out_path is None:
        (stdout or sys.stdout).write(text)
        return
    out = Path(cfg.out_path)
    with open(out, "w", newline="\n") as fh:
        fh.write(text)
    meta = _meta_items(cfg, command)
    with open(out.with_name(out.name + ".meta"), "w", newline="\n") as fh:
        for key in sorted(meta):
            fh.write(f"{key}={meta[key]}\n")


def evolve_rows(p: ModelParams, taus) -> list[tuple]:
    rows = []
    for tau in taus:
        t = p.time(tau)
        rows.append(
            (
                tau,
                prob_closed(p, t, Outcome.CAVITY1),
                prob_closed(p, t, Outcome.CAVITY2),
                concurrence_closed(p, t, Outcome.CAVITY1),
                concurrence_closed(p, t, Outcome.CAVITY2),
                average_concurrence(p, t),
            )
        )
    return rows


def cmd_evolve(cfg: RunConfig, stdout=None) -> int:
    cfg.require_resonance()
    rows = evolve_rows(cfg.params(), cfg.taus())
    emit(cfg, "evolve", csv_text(EVOLVE_HEADER, rows), stdout)
    return 0


def cmd_figure(which: str, cfg: RunConfig, stdout=None) -> int:
    cfg.require_resonance()
    rows = evolve_rows(cfg.params(), cfg.taus())
    if which == "concurrence":
        text = csv_text(CONCURRENCE_HEADER, [(r[0], r[3], r[1], r[4], r[2]) for r in rows])
    elif which == "average":
        text = csv_text(AVERAGE_HEADER, [(r[0], r[5]) for r in rows])
    else:
        raise ConfigError(f"unknown figure {which!r}")
    emit(cfg, f"figure {which}", text, stdout)
    return 0


def validation_failures(rows: Sequence[ComparisonReport]) -> list[tuple[float, float, str, float, float]]:
    """Violated invariants as ``(ratio, tau, check, value, bound)``."""
    failures = []
    for r in rows:
        checks = (
            ("f_exact_chain", 1 - r.fidelity_exact_vs_chain_exact, FIDELITY_TOL),
            ("f_rwa_analytic", 1 - r.fidelity_chain_rwa_vs_analytic, FIDELITY_TOL),
            ("norm", r.norm_error, NORM_TOL),
            ("dP", r.prob_delta, PROB_DELTA_SCALE / r.ratio),
        )
        for name, value, bound in checks:
            if not value <= bound:
                failures.append((r.ratio, r.tau, name, value, bound))
    worst = sorted(max_infidelity(rows).items())
    for (r_lo, inf_lo), (r_hi, inf_hi) in zip(worst, worst[1:]):
        if not inf_hi < inf_lo:
            failures.append((r_hi, math.nan, "rwa_monotone", inf_hi, inf_lo))
    return failures


def summary_text(rows: Sequence[ComparisonReport], failures) -> str:
    lines = ["ratio  max_infidelity  min_f_exact_chain  min_f_rwa_analytic  max_dP"]
    for ratio, worst in sorted(max_infidelity(rows).items()):
        rr = [r for r in rows if r.ratio == ratio]
        lines.append(
            f"{ratio:<6g} {worst:<15.6e} {min(r.fidelity_exact_vs_chain_exact for r in rr):<18.15f} "
            f"{min(r.fidelity_chain_rwa_vs_analytic for r in rr):<19.15f} {max(r.prob_delta for r in rr):.6e}"
        )
    if not failures:
        lines.append(f"PASS: all invariants hold on {len(rows)} rows")
    else:
        lines.append(f"FAIL: {len(failures)} violation(s)")
        lines.append("ratio  tau                  check           value          bound")
        for ratio, tau, name, value, bound in failures[:50]:
            lines.append(f"{ratio:<6g} {tau:<20.15g} {name:<15} {value:<14.6e} {bound:.6e}")
        if len(failures) > 50:
            lines.append(f"... {len(failures) - 50} more")
    return "\n".join(lines) + "\n"


def cmd_validate(cfg: RunConfig, ratios: Sequence[float] | None = None, stdout=None) -> int:
    cfg.require_resonance()
    ratios = tuple(cfg.ratios if ratios is None else ratios)
    rows = rwa_scan(ratios, cfg.taus(), n_b=cfg.n_b, omega_c=cfg.omega_c_over_g)
    table = [
        (
            r.ratio,
            r.tau,
            r.fidelity_exact_vs_chain_exact,
            r.fidelity_chain_rwa_vs_analytic,
            r.fidelity_exact_vs_analytic,
            r.prob_delta,
            r.concurrence_delta,
            r.leakage,
        )
        for r in rows
    ]
    failures = validation_failures(rows)
    emit(replace(cfg, ratios=ratios), "validate", csv_text(VALIDATE_HEADER, table), stdout)
    # summary goes to stderr when the CSV occupies stdout
    out = (stdout or sys.stdout) if cfg.out_path is not None else sys.stderr
    out.write(summary_text(rows, failures))
    return 1 if failures else 0


def cmd_scan(cfg: RunConfig, ratios: Sequence[float] | None = None, stdout=None) -> int:
    ratios = sorted(cfg.ratios if ratios is None else ratios)
    taus = cfg.taus()
    rows = []
    for ratio in ratios:
        row = scan_ratio(ratio, taus, n_b=cfg.n_b, xi_over_omega_m=cfg.xi_over_omega_m,
                         omega_c=cfg.omega_c_over_g)
        rows.append((row.ratio, row.c_ave_max, row.tau_at_max, row.infidelity))
    emit(replace(cfg, ratios=tuple(ratios)), "scan", csv_text(SCAN_HEADER, rows), stdout)
    return 0


def parse_real(text: str) -> float:
    """Float, optionally written as a multiple of pi (``3pi``, ``1.5*pi``, ``pi``)."""
    s = text.strip().lower().replace(" ", "")
    if s.endswith("pi"):
        head = s[:-2].rstrip("*")
        return (float(head) if head else 1.0) * math.pi
    return float(s)


def parse_ratios(text: str) -> tuple[float, ...]:
    items = [x for x in text.split(",") if x.strip()]
    if not items:
        raise ValueError("empty ratio list")
    return tuple(parse_real(x) for x in items)


# flag dest -> (RunConfig field, parser)
_FIELDS = {
    "ratio": ("ratio", parse_real),
    "xi_ratio": ("xi_over_omega_m", parse_real),
    "tau_max": ("tau_max", parse_real),
    "steps": ("steps", int),
    "nb": ("n_b", int),
    "omega_c": ("omega_c_over_g", parse_real),
    "ratios": ("ratios", parse_ratios),
    "out": ("out_path", Path),
    "format": ("format", str),
}


def read_config_file(path: Path) -> dict[str, str]:
    """Plain ``key=value`` lines; ``#`` starts a comment; keys use flag names."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, val = (x.strip() for x in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val
    return values


SCAN_DEFAULT_RATIOS = "10,15,30,100,10000"


def build_config(args: argparse.Namespace, **defaults: str) -> RunConfig:
    """Defaults, overridden by the config file, overridden by flags."""
    raw: dict[str, str] = dict(defaults)
    if args.config is not None:
        try:
            raw.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    for key in _FIELDS:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    kwargs = {}
    for key, val in raw.items():
        name, conv = _FIELDS[key]
        try:
            kwargs[name] = conv(val)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {val!r}") from exc
    cfg = RunConfig(**kwargs)
    cfg.check()
    return cfg


def _add_common(p: argparse.ArgumentParser, with_ratios: bool = False) -> None:
    p.add_argument("--ratio", help="omega_m / g (default 15)")
    p.add_argument("--xi-ratio", dest="xi_ratio", help="xi / omega_m (default 0.5)")
    p.add_argument("--tau-max", dest="tau_max", help="end of the scaled-time grid (default 3pi)")
    p.add_argument("--steps", help="number of grid points (default 400)")
    p.add_argument("--nb", help="Fock cutoff per mirror (default 12)")
    p.add_argument("--omega-c", dest="omega_c", help="omega_c / g, global phase only (default 0)")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--config", type=Path, help="key=value file; flags take precedence")
    if with_ratios:
        p.add_argument("--ratios", help="comma-separated omega_m/g values")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optomech",
        description="Single-photon mirror entanglement in a two-cavity optomechanical system.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("evolve", help="P1, P2, C1, C2, C_ave versus tau"))
    fig = sub.add_parser("figure", help="data for the concurrence or average-concurrence plots")
    fig.add_argument("which", choices=("concurrence", "average"))
    _add_common(fig)
    _add_common(sub.add_parser("validate", help="cross-check closed form against propagators"), True)
    _add_common(sub.add_parser("scan", help="best numerical average concurrence per ratio"), True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scan":
            cfg = build_config(args, ratios=SCAN_DEFAULT_RATIOS)
        else:
            cfg = build_config(args)
        if args.command == "evolve":
            return cmd_evolve(cfg)
        if args.command == "figure":
            return cmd_figure(args.which, cfg)
        if args.command == "validate":
            return cmd_validate(cfg)
        return cmd_scan(cfg)
    except (ConfigError, OSError) as exc:
        print(f"optomech: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: emit, absorb (time series of photons exchanged and field
intensity), dist (truncated photon distribution), spectrum (raw
frequency/amplitude terms), oracle (dense-evolution cross-check), and
scan (peak absorption vs. coherent mean with quadratic fit).

Configuration comes from flags and/or a JSON config file (--config);
explicit flags override file values.  Every run writes a data file plus a
manifest at <out>.manifest.json.  Exit codes: 0 success, 2 invalid
configuration, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import output
from ._evaluate import resolve_threads
from .distributions import (DistSpec, KINDS, TailPolicy, make_distribution)
from .errors import NumericalError, ParameterError
from .oracle import build_joint, evolve_photon_number
from .spectra import (absorption_spectrum, capacity_scan, emission_spectrum,
                      evaluate, intensity)

COMMANDS = ("emit", "absorb", "dist", "spectrum", "oracle", "scan")


@dataclass
class RunConfig:
    command: str
    n_tlm: int = 1
    kind: str = "coherent"
    displacement: float = 0.0
    n_thermal: float = 0.0
    squeeze_r: float = 0.0
    squeeze_psi: float = 0.0
    fock_l: int = 0
    detuning: float = 0.0
    t_max: float = 100.0
    t_steps: int = 2000
    tail_tol: float = 1e-12
    n_cap: int | None = None
    out_path: str = "run.csv"
    format: str = "csv"
    plot: bool = False
    threads: int = 0
    amp_floor: float | None = None
    mode: str = "emission"
    nbars: list[float] | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config field(s): {sorted(unknown)}")
        if "command" not in data:
            raise ParameterError("config field 'command' is required")
        return cls(**data)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ParameterError(f"field 'command' must be one of {COMMANDS}, "
                                 f"got {self.command!r}")
        if self.n_tlm < 1:
            raise ParameterError(f"field 'n_tlm' must be >= 1, got {self.n_tlm}")
        if self.kind not in KINDS:
            raise ParameterError(f"field 'kind' must be one of {KINDS}, "
                                 f"got {self.kind!r}")
        if not self.t_max > 0:
            raise ParameterError(f"field 't_max' must be > 0, got {self.t_max}")
        if self.t_steps < 2:
            raise ParameterError(f"field 't_steps' must be >= 2, got {self.t_steps}")
        if not self.tail_tol > 0:
            raise ParameterError(f"field 'tail_tol' must be > 0, got {self.tail_tol}")
        if self.format not in ("csv", "json"):
            raise ParameterError(f"field 'format' must be csv or json, "
                                 f"got {self.format!r}")
        if self.threads < 0:
            raise ParameterError(f"field 'threads' must be >= 0, got {self.threads}")
        if self.mode not in ("emission", "absorption"):
            raise ParameterError(f"field 'mode' must be emission or absorption, "
                                 f"got {self.mode!r}")
        if self.command == "scan" and not self.nbars:
            raise ParameterError("field 'nbars' is required for the scan command")

    def dist_spec(self) -> DistSpec:
        return DistSpec(kind=self.kind, beta=self.displacement,
                        n_thermal=self.n_thermal, r=self.squeeze_r,
                        psi=self.squeeze_psi, fock_l=self.fock_l)

    def tail_policy(self) -> TailPolicy:
        return TailPolicy(tail_tol=self.tail_tol, n_cap=self.n_cap)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.t_steps)


def run(config: RunConfig) -> int:
    """Execute one command; writes data file(s) and manifest, returns 0."""
    config.validate()
    started = time.perf_counter()
    workers = resolve_threads(config.threads)
    out = Path(config.out_path)
    stats: dict = {"command": config.command, "workers": workers}

    if config.command == "scan":
        scan = capacity_scan(config.n_tlm, config.nbars, config.t_max,
                             config.t_steps, tail_tol=config.tail_tol,
                             threads=config.threads)
        payload = {
            "n_tlm": config.n_tlm,
            "points": [[nbar, peak] for nbar, peak in scan.points],
            "fit": list(scan.fit),
            "residual_rms": scan.residual_rms,
        }
        output._write_json(payload, out)
        stats["scan"] = payload
    else:
        dist = make_distribution(config.dist_spec(), config.tail_policy())
        stats["n_max"] = dist.n_max
        stats["tail_mass"] = float(dist.tail_mass)

        if config.command == "dist":
            if config.format == "csv":
                output.write_dist_csv(dist.probs, out)
            else:
                output.write_dist_json(dist, out)
        else:
            mode = {"emit": "emission", "absorb": "absorption"}.get(
                config.command, config.mode)
            build = emission_spectrum if mode == "emission" else absorption_spectrum
            spectrum = build(dist, config.n_tlm, config.detuning,
                             amp_floor=config.amp_floor, threads=config.threads)
            stats["n_terms"] = spectrum.n_terms
            stats["dropped_amplitude_mass"] = float(spectrum.dropped_mass)
            stats["amp_floor"] = float(spectrum.amp_floor)

            if config.command == "spectrum":
                if config.format == "csv":
                    output.write_spectrum_csv(spectrum, out)
                else:
                    output.write_spectrum_json(spectrum, out)
            else:
                times = config.times()
                series = evaluate(spectrum, times, threads=config.threads)
                inten = intensity(series, dist.mean_closed)
                if config.command == "oracle":
                    pad = config.n_tlm if mode == "emission" else 0
                    joint = build_joint(config.n_tlm, dist.n_max + pad,
                                        config.detuning)
                    tlm = "up" if mode == "emission" else "down"
                    dense = evolve_photon_number(joint, dist, tlm, times)
                    nbar0 = float(np.arange(dist.n_max + 1, dtype=float)
                                  @ dist.probs)
                    if mode == "emission":
                        dense_s = dense.values - nbar0
                    else:
                        dense_s = nbar0 - dense.values
                    deviation = float(np.max(np.abs(series.values - dense_s)))
                    stats["max_deviation"] = deviation
                    stats["joint_dim"] = joint.dim
                if config.format == "csv":
                    output.write_csv(series, inten, out)
                else:
                    output.write_series_json(series, inten, out)
                if config.plot:
                    output.write_svg([series, inten],
                                     [series.label, "intensity"],
                                     out.with_suffix(".svg"))

    stats["wall_time_s"] = time.perf_counter() - started
    output.write_manifest(config.to_dict(), stats,
                          str(out) + ".manifest.json")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcmode",
        description="Stimulated emission/absorption of a single field mode "
                    "by N two-level molecules.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("emit", "time series of S1 (all molecules up) and intensity"),
        ("absorb", "time series of S4 (all molecules down) and intensity"),
        ("dist", "truncated photon-number distribution"),
        ("spectrum", "frequency/amplitude terms of S1 or S4"),
        ("oracle", "dense-evolution cross-check of the spectral path"),
        ("scan", "peak absorption vs. coherent mean, with quadratic fit"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--n-tlm", type=int, dest="n_tlm")
        p.add_argument("--kind", choices=KINDS)
        p.add_argument("--displacement", type=float,
                       help="coherent amplitude |beta|; mean = beta^2")
        p.add_argument("--n-thermal", type=float, dest="n_thermal")
        p.add_argument("--squeeze-r", type=float, dest="squeeze_r")
        p.add_argument("--squeeze-psi", type=float, dest="squeeze_psi")
        p.add_argument("--fock-l", type=int, dest="fock_l")
        p.add_argument("--detuning", type=float,
                       help="relative tuning parameter; 0 is resonance")
        p.add_argument("--t-max", type=float, dest="t_max")
        p.add_argument("--t-steps", type=int, dest="t_steps")
        p.add_argument("--tail-tol", type=float, dest="tail_tol")
        p.add_argument("--n-cap", type=int, dest="n_cap")
        p.add_argument("--out", dest="out_path")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--plot", action="store_const", const=True)
        p.add_argument("--threads", type=int)
        p.add_argument("--amp-floor", type=float, dest="amp_floor")
        if name in ("spectrum", "oracle"):
            p.add_argument("--mode", choices=("emission", "absorption"))
        if name == "scan":
            p.add_argument("--nbars", type=float, nargs="+")
    return parser


def build_config(argv) -> RunConfig:
    args = _build_parser().parse_args(argv)
    provided = {k: v for k, v in vars(args).items()
                if v is not None and k != "config"}
    merged: dict = {}
    if args.config:
        file_data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(file_data, dict):
            raise ParameterError("config file must hold a JSON object")
        merged.update(file_data)
    merged.update(provided)
    config = RunConfig.from_dict(merged)
    config.validate()
    return config


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        config = build_config(argv)
        return run(config)
    except ParameterError as exc:
        print(f"tcmode: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"tcmode: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"tcmode: I/O failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())

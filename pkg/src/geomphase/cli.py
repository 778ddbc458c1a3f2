"""Command-line front end: argument parsing, orchestration, file output.

Four commands share one executable:

  simulate  -- drive a circuit with the full two-arm propagation
  oracle    -- adiabatic solid-angle prediction only (no propagation)
  sweep     -- Pancharatnam readings over a rectangular parameter grid
  monopole  -- transport the loop around a monopole and track the phase

Output files are byte-deterministic for a given configuration: CSV floats
are written in scientific notation with 17 significant digits and JSON uses
a fixed layout.  Exit codes: 0 success, 2 invalid input, 3 numerical
failure (orthogonal states at a sample, non-quantized winding, refinement
depth exceeded, degenerate geometry).
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import circuits, geometry, phase, spinsys
from .errors import GeomphaseError, NonQuantizedWinding

TRACE_CSV_HEADER = "index,b1,bz,c,alpha_wrapped,alpha_unwrapped,oracle_unwrapped"
SWEEP_CSV_HEADER = "i,j,b1,bz,c,alpha_wrapped"
MONOPOLE_CSV_HEADER = "index,b1,bz,phase_unwrapped"


@dataclass
class RunConfig:
    """Validated run request assembled from the command line."""

    command: str
    circuit: circuits.Circuit = None
    beta: float = None
    two_j: int = 1
    n_steps: int = 20000
    sampling_rule: str = "left_endpoint"
    exp_method: str = "auto"
    refine: bool = False
    branch: int = 0
    omega_sign: int = 1
    out: str = None
    fmt: str = "csv"
    threads: int = 1
    # sweep-only
    b1_range: tuple = None
    bz_range: tuple = None
    grid: tuple = None
    # monopole-only
    strength: float = None
    string_thickness: float = 0.0


def _fmt_float(x):
    return f"{x:.16e}"


def circuit_to_json(circuit):
    """Serialize a circuit to the on-disk JSON schema."""
    return json.dumps(
        {
            "vertices": [[b1, bz] for b1, bz in circuit.vertices],
            "points_per_segment": circuit.points_per_segment,
        },
        indent=2,
    ) + "\n"


def circuit_from_json(text):
    """Parse the strict circuit schema; unknown keys are rejected."""
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("circuit JSON must be an object")
    allowed = {"vertices", "points_per_segment"}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown circuit keys: {sorted(unknown)}")
    if "vertices" not in data:
        raise ValueError("circuit JSON lacks 'vertices'")
    vertices = data["vertices"]
    if not isinstance(vertices, list) or any(
        not isinstance(v, list) or len(v) != 2 for v in vertices
    ):
        raise ValueError("'vertices' must be a list of [b1, bz] pairs")
    pps = data.get("points_per_segment", 100)
    if not isinstance(pps, int):
        raise ValueError("'points_per_segment' must be an integer")
    return circuits.Circuit(tuple((v[0], v[1]) for v in vertices), pps)


def _load_circuit(value, points_override=None):
    """Resolve a --circuit value: preset name or JSON file path."""
    if value.upper() in circuits.PRESET_NAMES:
        circuit, beta = circuits.preset_circuit(value)
    else:
        if not os.path.exists(value):
            raise ValueError(f"circuit file not found: {value}")
        with open(value, "r", encoding="utf-8") as fh:
            circuit = circuit_from_json(fh.read())
        beta = None
    if points_override is not None:
        circuit = circuits.Circuit(circuit.vertices, points_override, circuit.name)
    return circuit, beta


def _default_threads():
    env = os.environ.get("GEOMPHASE_THREADS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="geomphase",
        description="Spin interferometer phase-winding simulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_beta):
        p.add_argument(
            "--circuit",
            required=True,
            help="preset name (abcda|efghe|spqrs) or path to a circuit JSON",
        )
        p.add_argument("--points-per-segment", type=int, default=None)
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if needs_beta:
            p.add_argument("--beta", type=float, default=None)
            p.add_argument("--two-j", dest="two_j", type=int, default=1)

    sim = sub.add_parser("simulate", help="drive a circuit with full propagation")
    add_common(sim, needs_beta=True)
    sim.add_argument("--steps", dest="n_steps", type=int, default=20000)
    sim.add_argument(
        "--sampling",
        choices=spinsys.SAMPLING_RULES,
        default="left_endpoint",
    )
    sim.add_argument("--exp-method", choices=spinsys.EXP_METHODS, default="auto")
    sim.add_argument("--refine", action="store_true")
    sim.add_argument("--branch", type=int, default=0,
                     help="starting eigenstate index, 0 = lowest")
    sim.add_argument("--omega-sign", type=int, choices=(1, -1), default=1)
    sim.add_argument("--threads", type=int, default=None)

    orc = sub.add_parser("oracle", help="solid-angle prediction only")
    add_common(orc, needs_beta=False)
    orc.add_argument("--two-j", dest="two_j", type=int, default=1)

    swp = sub.add_parser("sweep", help="grid of interference readings")
    swp.add_argument("--b1-min", type=float, required=True)
    swp.add_argument("--b1-max", type=float, required=True)
    swp.add_argument("--bz-min", type=float, required=True)
    swp.add_argument("--bz-max", type=float, required=True)
    swp.add_argument("--nx", type=int, required=True)
    swp.add_argument("--ny", type=int, required=True)
    swp.add_argument("--beta", type=float, required=True)
    swp.add_argument("--two-j", dest="two_j", type=int, default=1)
    swp.add_argument("--steps", dest="n_steps", type=int, default=20000)
    swp.add_argument("--threads", type=int, default=None)
    swp.add_argument("--out", required=True)
    swp.add_argument("--format", choices=("csv", "json"), default="csv")

    mono = sub.add_parser("monopole", help="loop transport around a monopole")
    add_common(mono, needs_beta=False)
    mono.add_argument("--strength", type=float, required=True,
                      help="monopole strength, a nonzero half-integer")
    mono.add_argument("--string-thickness", type=float, default=0.0)

    return parser


def parse_args(argv=None):
    """Parse and validate a command line into a RunConfig.

    argparse handles unknown flags and missing arguments with exit code 2;
    semantic errors (bad circuit files, invalid strengths) are reported the
    same way.
    """
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        return _config_from_namespace(ns)
    except (ValueError, json.JSONDecodeError) as exc:
        parser.exit(2, f"geomphase: error: {exc}\n")


def _config_from_namespace(ns):
    config = RunConfig(command=ns.command)
    config.out = ns.out
    config.fmt = ns.format

    if ns.command == "sweep":
        if ns.nx < 2 or ns.ny < 2:
            raise ValueError("sweep grid dimensions must be >= 2")
        config.b1_range = (ns.b1_min, ns.b1_max)
        config.bz_range = (ns.bz_min, ns.bz_max)
        config.grid = (ns.nx, ns.ny)
        config.beta = ns.beta
        config.two_j = ns.two_j
        config.n_steps = ns.n_steps
        config.threads = ns.threads if ns.threads else _default_threads()
        return config

    circuit, preset_beta = _load_circuit(ns.circuit, ns.points_per_segment)
    config.circuit = circuit

    if ns.command == "simulate":
        config.beta = ns.beta if ns.beta is not None else preset_beta
        if config.beta is None:
            raise ValueError("--beta is required for non-preset circuits")
        config.two_j = ns.two_j
        config.n_steps = ns.n_steps
        config.sampling_rule = ns.sampling
        config.exp_method = ns.exp_method
        config.refine = ns.refine
        config.branch = ns.branch
        config.omega_sign = ns.omega_sign
        config.threads = ns.threads if ns.threads else _default_threads()
        if config.two_j < 1:
            raise ValueError("--two-j must be >= 1")
        if not 0 <= config.branch <= config.two_j:
            raise ValueError("--branch must lie in [0, two_j]")
    elif ns.command == "oracle":
        config.two_j = ns.two_j
        if config.two_j < 1:
            raise ValueError("--two-j must be >= 1")
    elif ns.command == "monopole":
        doubled = 2.0 * ns.strength
        if abs(doubled - round(doubled)) > 1e-9 or round(doubled) == 0:
            raise ValueError("--strength must be a nonzero half-integer")
        if ns.string_thickness < 0:
            raise ValueError("--string-thickness must be >= 0")
        config.strength = ns.strength
        config.string_thickness = ns.string_thickness
    return config


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _trace_csv(trace):
    lines = [TRACE_CSV_HEADER]
    for s in trace.samples:
        oracle = "" if s.oracle_unwrapped is None else _fmt_float(s.oracle_unwrapped)
        lines.append(
            f"{s.index},{_fmt_float(s.b1)},{_fmt_float(s.bz)},"
            f"{_fmt_float(s.modulus_c)},{_fmt_float(s.alpha_wrapped)},"
            f"{_fmt_float(s.alpha_unwrapped)},{oracle}"
        )
    return "\n".join(lines) + "\n"


def _trace_json(trace):
    meta = trace.metadata
    payload = {
        "metadata": None
        if meta is None
        else {
            "beta": meta.beta,
            "two_j": meta.two_j,
            "omega_sign": meta.omega_sign,
            "branch": meta.branch,
            "n_steps": meta.n_steps,
            "sampling_rule": meta.sampling_rule,
            "exp_method": meta.exp_method,
            "circuit_name": meta.circuit_name,
            "vertices": [list(v) for v in meta.vertices],
            "points_per_segment": meta.points_per_segment,
            "refine": meta.refine,
        },
        "samples": [
            {
                "index": s.index,
                "b1": s.b1,
                "bz": s.bz,
                "c": s.modulus_c,
                "alpha_wrapped": s.alpha_wrapped,
                "alpha_unwrapped": s.alpha_unwrapped,
                "oracle_unwrapped": s.oracle_unwrapped,
            }
            for s in trace.samples
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _oracle_trace_csv(points, oracle):
    lines = [TRACE_CSV_HEADER]
    for k, ((b1, bz), value) in enumerate(zip(points, oracle)):
        lines.append(
            f"{k},{_fmt_float(b1)},{_fmt_float(bz)},,,,{_fmt_float(value)}"
        )
    return "\n".join(lines) + "\n"


def _sweep_csv(result):
    lines = [SWEEP_CSV_HEADER]
    for i, bz in enumerate(result.bz_values):
        for j, b1 in enumerate(result.b1_values):
            alpha = result.alpha_wrapped[i, j]
            alpha_txt = "" if np.isnan(alpha) else _fmt_float(alpha)
            lines.append(
                f"{i},{j},{_fmt_float(b1)},{_fmt_float(bz)},"
                f"{_fmt_float(result.modulus_c[i, j])},{alpha_txt}"
            )
    return "\n".join(lines) + "\n"


def _monopole_csv(points, phases):
    lines = [MONOPOLE_CSV_HEADER]
    for k, ((b1, bz), value) in enumerate(zip(points, phases)):
        lines.append(
            f"{k},{_fmt_float(b1)},{_fmt_float(bz)},{_fmt_float(value)}"
        )
    return "\n".join(lines) + "\n"


def _summary(winding, residual, max_dev):
    return f"winding={winding} residual={residual:.6f} max_oracle_dev={max_dev:.6f}"


def run(config):
    """Execute a validated configuration; returns the process exit code."""
    try:
        if config.command == "simulate":
            return _run_simulate(config)
        if config.command == "oracle":
            return _run_oracle(config)
        if config.command == "sweep":
            return _run_sweep(config)
        if config.command == "monopole":
            return _run_monopole(config)
        raise ValueError(f"unknown command {config.command!r}")
    except GeomphaseError as exc:
        kind = type(exc).__name__
        index = getattr(exc, "sample_index", None)
        where = f" sample={index}" if index is not None else ""
        print(f"{kind}:{where} {exc}", file=sys.stderr)
        return 3


def _run_simulate(config):
    settings = spinsys.PropagationSettings(
        n_steps=config.n_steps,
        sampling_rule=config.sampling_rule,
        exp_method=config.exp_method,
    )
    trace = circuits.trace_circuit(
        config.circuit,
        config.beta,
        two_j=config.two_j,
        settings=settings,
        refine=config.refine,
        omega_sign=config.omega_sign,
        branch=config.branch,
        threads=config.threads,
    )
    text = _trace_csv(trace) if config.fmt == "csv" else _trace_json(trace)
    _write_text(config.out, text)

    delta = trace.delta_alpha()
    max_dev = circuits.max_oracle_deviation(trace)
    w = phase.winding(trace)  # may raise NonQuantizedWinding -> exit 3
    residual = abs(delta / (2.0 * np.pi) - w)
    print(_summary(w, residual, max_dev))
    return 0


def _run_oracle(config):
    points = [tuple(p) for p in circuits.sample_circuit(config.circuit)]
    oracle = geometry.oracle_phase_trace(points, config.two_j)
    if config.fmt == "csv":
        text = _oracle_trace_csv(points, oracle)
    else:
        text = json.dumps(
            {
                "two_j": config.two_j,
                "samples": [
                    {"index": k, "b1": p[0], "bz": p[1], "oracle_unwrapped": float(v)}
                    for k, (p, v) in enumerate(zip(points, oracle))
                ],
            },
            indent=2,
        ) + "\n"
    _write_text(config.out, text)
    delta = float(oracle[-1] - oracle[0])
    w = phase.winding_of_delta(delta)
    residual = abs(delta / (2.0 * np.pi) - w)
    print(_summary(w, residual, 0.0))
    return 0


def _run_sweep(config):
    settings = spinsys.PropagationSettings(n_steps=config.n_steps)
    result = circuits.sweep_plane(
        config.b1_range,
        config.bz_range,
        config.grid,
        config.beta,
        two_j=config.two_j,
        settings=settings,
        threads=config.threads,
    )
    if config.fmt == "csv":
        text = _sweep_csv(result)
    else:
        text = json.dumps(
            {
                "b1_values": list(result.b1_values),
                "bz_values": list(result.bz_values),
                "modulus_c": result.modulus_c.tolist(),
                "alpha_wrapped": [
                    [None if np.isnan(a) else a for a in row]
                    for row in result.alpha_wrapped
                ],
            },
            indent=2,
        ) + "\n"
    _write_text(config.out, text)
    undefined = int(np.isnan(result.alpha_wrapped).sum())
    print(
        f"min_c={result.modulus_c.min():.6f} max_c={result.modulus_c.max():.6f} "
        f"undefined_cells={undefined}"
    )
    return 0


def _run_monopole(config):
    scene = geometry.MonopoleScene(
        strength_g=config.strength, string_thickness=config.string_thickness
    )
    points = [tuple(p) for p in circuits.sample_circuit(config.circuit)]
    phases = geometry.monopole_transport_trace(points, scene)
    if config.fmt == "csv":
        text = _monopole_csv(points, phases)
    else:
        text = json.dumps(
            {
                "strength_g": scene.strength_g,
                "string_thickness": scene.string_thickness,
                "samples": [
                    {"index": k, "b1": p[0], "bz": p[1], "phase_unwrapped": float(v)}
                    for k, (p, v) in enumerate(zip(points, phases))
                ],
            },
            indent=2,
        ) + "\n"
    _write_text(config.out, text)
    delta = float(phases[-1] - phases[0])
    turns = delta / (2.0 * np.pi)
    w = int(np.round(turns))
    residual = abs(turns - w)
    if residual >= phase.WINDING_RESIDUAL_TOL:
        raise NonQuantizedWinding(
            f"monopole net phase {delta:.6f} is not a 2*pi multiple",
            residual=residual,
        )
    print(_summary(w, residual, 0.0))
    return 0


def main(argv=None):
    try:
        config = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

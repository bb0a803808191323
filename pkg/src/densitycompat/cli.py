"""Command line front end.

Exit codes: 0 ok / compatible, 1 contradiction witness found, 2 input error,
3 degenerate geometry (no unique blind direction).
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import matrixio, oracle
from .compat import WitnessError, compat_report, peierls_first, peierls_second
from .matrixio import MatrixFormatError
from .qcore import DEFAULT_TOL, BlochVector, DensityMatrix, InvariantError, Tolerances
from .scenario import (
    DegenerateGeometryError,
    ScenarioConfig,
    blind_direction,
    conditional_records,
    config_from_json,
    apply_right_unitary,
    measure_right,
    prepare_entangled,
    run_scenario,
    unitary_from_spec,
)
from .sampling import Stream

EXIT_OK = 0
EXIT_CONTRADICTION = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3

MARGIN_FACTOR = 10.0

_ANGLE = re.compile(
    r"^\s*(?:(?P<num>[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*\s*)?pi\s*(?:/\s*(?P<den>[0-9]*\.?[0-9]+))?\s*$"
)


class InputError(Exception):
    pass


def parse_angle(text: str) -> float:
    """Radians, either numeric or ``pi``, ``pi/N``, ``M*pi``, ``M*pi/N``."""
    m = _ANGLE.match(text.lower())
    if m:
        num = float(m.group("num")) if m.group("num") else 1.0
        den = float(m.group("den")) if m.group("den") else 1.0
        if den == 0:
            raise InputError(f"bad angle {text!r}")
        return num * math.pi / den
    try:
        value = float(text)
    except ValueError:
        raise InputError(f"bad angle {text!r}") from None
    if not math.isfinite(value):
        raise InputError(f"bad angle {text!r}")
    return value


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return matrixio.loads(text)


def _load_unitary(spec: str, tol: Tolerances):
    if spec.lower() in ("hadamard", "identity"):
        return unitary_from_spec(spec, tol)
    return unitary_from_spec(_read_json(spec), tol)


def _load_density(path: str, tol: Tolerances, label: str) -> DensityMatrix:
    m = matrixio.matrix_from_json(_read_json(path))
    try:
        return DensityMatrix(m, tol)
    except InvariantError as exc:
        raise InputError(f"invalid density matrix {label} ({path}): {exc}") from exc


def _tolerances(args) -> Tolerances:
    if args.tol is None:
        return DEFAULT_TOL
    if not (args.tol > 0 and math.isfinite(args.tol)):
        raise InputError("--tol must be a positive number")
    return DEFAULT_TOL.replace(commute=args.tol, product=args.tol)


def _config(args, tol: Tolerances) -> tuple[ScenarioConfig, int | None]:
    """Scenario from ``--scenario`` or from ``--theta/--unitary/--seed``; also returns shots."""
    if getattr(args, "scenario", None):
        config, shots = config_from_json(_read_json(args.scenario))
        return config, shots
    theta = parse_angle(args.theta)
    return ScenarioConfig(theta, _load_unitary(args.unitary, tol), args.seed), None


# ---------------------------------------------------------------------------
# text rendering


def format_matrix(m) -> str:
    rows = []
    for row in np.asarray(m):
        rows.append("  [" + ", ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row) + "]")
    return "\n".join(rows)


def _fmt_vec(v) -> str:
    # round first so tiny negatives do not print as -0.000000
    return "(" + ", ".join(f"{round(float(x), 6) + 0.0:+.6f}" for x in v) + ")"


# ---------------------------------------------------------------------------
# commands


def cmd_counterexample(args) -> tuple[int, dict, str]:
    tol = _tolerances(args)
    config, _ = _config(args, tol)
    if args.outcome == "sample":
        prepared = prepare_entangled(config.theta)
        psi = apply_right_unitary(prepared, config.alice_unitary)
        records = [measure_right(psi, None, Stream(config.seed), prepared=prepared)]
    elif args.outcome is not None:
        records = [run_scenario(config, int(args.outcome))]
    else:
        records = conditional_records(config)

    bob = records[0].bob_state
    outcomes = []
    for rec in records:
        commute, cnorm = peierls_first(bob, rec.alice_state, tol)
        nonzero, pnorm = peierls_second(rec.alice_state, bob, tol)
        comm = bob.matrix @ rec.alice_state.matrix - rec.alice_state.matrix @ bob.matrix
        outcomes.append(
            {
                "outcome": rec.outcome,
                "probability": rec.probability,
                "alice_state": matrixio.matrix_to_json(rec.alice_state.matrix),
                "commutator": matrixio.matrix_to_json(comm),
                "commutator_norm": cnorm,
                "commute": commute,
                "product_norm": pnorm,
                "product_nonzero": nonzero,
            }
        )
    try:
        blind = blind_direction(config).to_json()
    except DegenerateGeometryError:
        blind = None
    report = {
        "command": "counterexample",
        "theta": config.theta,
        "seed": config.seed,
        "unitary": matrixio.matrix_to_json(config.alice_unitary.matrix),
        "bob_state": matrixio.matrix_to_json(bob.matrix),
        "outcomes": outcomes,
        "commute": all(o["commute"] for o in outcomes),
        "product_nonzero": all(o["product_nonzero"] for o in outcomes),
        "blind_direction": blind,
    }

    lines = [f"theta = {config.theta:.10f}", "Bob's state:", format_matrix(bob.matrix)]
    for o, rec in zip(outcomes, records):
        lines += [
            f"outcome {o['outcome']} (probability {o['probability']:.6f})",
            "Alice's state:",
            format_matrix(rec.alice_state.matrix),
            "[rho_bob, rho_alice]:",
            format_matrix(matrixio.matrix_from_json(o["commutator"])),
            f"commutator norm {o['commutator_norm']:.6e}  commute={o['commute']}",
            f"product norm    {o['product_norm']:.6e}  product_nonzero={o['product_nonzero']}",
        ]
    lines.append(f"first condition (commute): {report['commute']}")
    lines.append(f"second condition (non-zero product): {report['product_nonzero']}")
    return EXIT_OK, report, "\n".join(lines)


def _compat(args) -> tuple[int, dict, str]:
    tol = _tolerances(args)
    a = _load_density(args.file_a, tol, "a")
    b = _load_density(args.file_b, tol, "b")
    if a.dim != b.dim:
        raise InputError(f"dimension mismatch {a.dim} vs {b.dim}")
    try:
        report = compat_report(a, b, tol)
        marginal = report.product_nonzero and report.product_norm <= MARGIN_FACTOR * tol.product
    except WitnessError:
        commute, cnorm = peierls_first(a, b, tol)
        _, pnorm = peierls_second(a, b, tol)
        out = {
            "commute": commute,
            "commutator_norm": cnorm,
            "product_norm": pnorm,
            "product_nonzero": False,
            "witness": None,
            "verdict": "marginal",
        }
        return EXIT_OK, out, _compat_text(out)
    out = report.to_json()
    if not report.product_nonzero:
        out["verdict"] = "incompatible"
        code = EXIT_CONTRADICTION
    else:
        out["verdict"] = "marginal" if marginal else "compatible"
        code = EXIT_OK
    return code, out, _compat_text(out)


def _compat_text(out: dict) -> str:
    lines = [
        f"verdict: {out['verdict']}",
        f"commute: {out['commute']}  (commutator norm {out['commutator_norm']:.6e})",
        f"product_nonzero: {out['product_nonzero']}  (product norm {out['product_norm']:.6e})",
    ]
    w = out.get("witness")
    if w:
        lines.append(
            f"witness: Tr(a P) = {w['alice_prob']:.6e}, Tr(b P) = {w['bob_prob']:.6f}; P ="
        )
        lines.append(format_matrix(matrixio.matrix_from_json(w["effects"][0])))
    return "\n".join(lines)


def cmd_compat(args):
    code, out, text = _compat(args)
    out = {"command": "compat", **out}
    return code, out, text


def cmd_witness(args):
    code, out, _ = _compat(args)
    w = out.get("witness")
    text = f"verdict: {out['verdict']}\n"
    if w:
        text += f"P (Tr(a P) = {w['alice_prob']:.6e}, Tr(b P) = {w['bob_prob']:.6f}):\n"
        text += format_matrix(matrixio.matrix_from_json(w["effects"][0]))
    else:
        text += "no contradiction witness"
    return code, {"command": "witness", "verdict": out["verdict"], "witness": w}, text


def cmd_bloch(args):
    tol = _tolerances(args)
    config, _ = _config(args, tol)
    try:
        rep = blind_direction(config)
    except DegenerateGeometryError as exc:
        out = {"command": "bloch", "theta": config.theta, "degenerate": True, "reason": str(exc)}
        return EXIT_DEGENERATE, out, f"degenerate: {exc}"
    out = {"command": "bloch", "theta": config.theta, "degenerate": False, **rep.to_json()}
    text = "\n".join(
        [
            f"n_plus  = {_fmt_vec(rep.n_plus.as_array())}  p = {rep.p:.6f}",
            f"n_minus = {_fmt_vec(rep.n_minus.as_array())}  q = {rep.q:.6f}",
            f"blind   = {_fmt_vec(rep.blind.as_array())}",
            f"constraint residual = {rep.constraint_residual:.3e}",
        ]
    )
    return EXIT_OK, out, text


def _direction(text: str, config: ScenarioConfig) -> BlochVector:
    if text.lower() == "blind":
        return blind_direction(config).blind
    named = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
    if text.lower() in named:
        return BlochVector(*map(float, named[text.lower()]))
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise InputError(f"bad direction {text!r}") from None
    if v.shape != (3,) or not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0:
        raise InputError(f"bad direction {text!r}")
    return BlochVector.from_array(v / np.linalg.norm(v))


def cmd_simulate(args):
    tol = _tolerances(args)
    config, shots = _config(args, tol)
    if args.shots is not None or shots is None:
        shots = args.shots if args.shots is not None else 100_000
    if shots < 1:
        raise InputError("shots must be at least 1")
    try:
        direction = _direction(args.direction, config)
    except DegenerateGeometryError as exc:
        out = {"command": "simulate", "degenerate": True, "reason": str(exc)}
        return EXIT_DEGENERATE, out, f"degenerate: {exc}"
    freq, expected = oracle.simulate_frequencies(config, direction, shots)
    band = oracle.binomial_band(expected, shots)
    passed = abs(freq - expected) <= band
    out = {
        "command": "simulate",
        "theta": config.theta,
        "seed": config.seed,
        "shots": shots,
        "direction": [float(x) for x in direction.as_array()],
        "freq_up": freq,
        "expected": expected,
        "band": band,
        "pass": passed,
    }
    text = "\n".join(
        [
            f"direction {_fmt_vec(direction.as_array())}, {shots} shots, seed {config.seed}",
            f"empirical up frequency {freq:.6f}",
            f"predicted              {expected:.6f} +/- {band:.6f} (4 sigma)",
            f"{'PASS' if passed else 'FAIL'}",
        ]
    )
    return EXIT_OK, out, text


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--format", choices=("text", "json"), default="text")
    shared.add_argument("--tol", type=float, default=None, help="commutator and product tolerance")
    shared.add_argument("--seed", type=int, default=0)

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--theta", default="pi/8", help="radians, or pi/N, M*pi/N")
    scen.add_argument("--unitary", default="hadamard", help="hadamard, identity or a matrix JSON file")
    scen.add_argument("--scenario", help="scenario JSON file (overrides --theta/--unitary/--seed)")

    parser = argparse.ArgumentParser(
        prog="densitycompat", description="Consistency of density matrices held by different observers"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("counterexample", parents=[shared, scen], help="two observers' states and both conditions")
    p.add_argument("--outcome", choices=("0", "1", "sample"), default=None)
    p.set_defaults(func=cmd_counterexample)

    for name, func, doc in (
        ("compat", cmd_compat, "full compatibility report for two density matrices"),
        ("witness", cmd_witness, "contradiction witness only"),
    ):
        p = sub.add_parser(name, parents=[shared], help=doc)
        p.add_argument("file_a")
        p.add_argument("file_b")
        p.set_defaults(func=func)

    p = sub.add_parser("bloch", parents=[shared, scen], help="blind direction and Bloch constraint")
    p.set_defaults(func=cmd_bloch)

    p = sub.add_parser("simulate", parents=[shared, scen], help="Monte Carlo spin statistics")
    p.add_argument("--direction", default="blind", help="blind, x, y, z or 'x,y,z'")
    p.add_argument("--shots", type=int, default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        code, out, text = args.func(args)
    except (InputError, MatrixFormatError, InvariantError, ValueError) as exc:
        if args.format == "json":
            print(matrixio.dumps({"command": args.command, "error": str(exc)}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.format == "json":
        print(matrixio.dumps(out, indent=2))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

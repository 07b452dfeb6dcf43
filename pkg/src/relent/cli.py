"""Command-line front end.

One JSON object per invocation on stdout (infinities encoded as the
string "inf"); ``--csv`` flattens scalar fields for spreadsheet use, and
``--sweep name=a:b:step`` repeats the command over a parameter grid,
substituting ``{name}`` in any argument and emitting one CSV row per
grid point. Exit codes: 0 success, 2 malformed input or invariant
violation, 3 unsupported configuration.

States are named presets (``bell``, ``bell-minus``, ``cc-mix``,
``werner:F``, ``pure:theta``, ``mixed:d``, ``ghz:n``) or ``@file.json``
with ``{"dims": [...], "matrix": [{"re": ..., "im": ...}, ...]}``,
row-major. Channels are ``@file.json`` with ``{"dims": [...],
"parties": [[op, ...], ...]}``, each op row-major {re, im} pairs.

Seeded commands are reproducible: the JSON output (timestamp aside) is
byte-identical across runs and worker counts. RELENT_SEED sets the
default seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from .classical import kl_divergence, simulate_inference
from .errors import DomainError, RelentError, UnsupportedConfigError, ValidationError
from .linalg import NATS_PER_BIT, DensityMatrix, PureState
from .optimize import OptimizerBudget
from .quantum import (measured_relative_entropy, n_copy_measured_relative_entropy,
                      quantum_confusion_probability, quantum_relative_entropy)
from .ree import relative_entropy_of_entanglement
from .separable import LocalChannel, apply_channel_to_density, ppt_test
from .states import (bell_minus, bell_plus, cc_mix, ghz, maximally_mixed,
                     schmidt_pure, werner)


def _default_seed() -> int:
    try:
        return int(os.environ.get("RELENT_SEED", "0"))
    except ValueError:
        return 0


def _parse_dist(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise DomainError(f"malformed probability vector {text!r}") from exc


def _complex_list(flat) -> np.ndarray:
    out = np.empty(len(flat), dtype=complex)
    for i, entry in enumerate(flat):
        try:
            out[i] = complex(float(entry["re"]), float(entry["im"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"matrix entry {i} is not a {{re, im}} pair") from exc
    return out


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path} is not valid JSON: {exc}") from exc


def load_state_file(path: str) -> DensityMatrix:
    data = _load_json(path)
    if "dims" not in data:
        raise DomainError(f"{path}: a 'dims' field is mandatory")
    dims = tuple(int(d) for d in data["dims"])
    d = int(np.prod(dims))
    flat = _complex_list(data.get("matrix", []))
    if flat.size != d * d:
        raise DomainError(f"{path}: matrix has {flat.size} entries, expected {d * d}")
    return DensityMatrix(dims, flat.reshape(d, d))


def load_channel_file(path: str) -> LocalChannel:
    data = _load_json(path)
    if "dims" not in data or "parties" not in data:
        raise DomainError(f"{path}: channel files need 'dims' and 'parties'")
    dims = [int(d) for d in data["dims"]]
    parties = data["parties"]
    if len(parties) != len(dims):
        raise DomainError(f"{path}: one Kraus list per party required")
    kraus = []
    for d, ops in zip(dims, parties):
        mats = []
        for op in ops:
            flat = _complex_list(op)
            if flat.size != d * d:
                raise DomainError(f"{path}: Kraus operator has {flat.size} entries, "
                                  f"expected {d * d}")
            mats.append(flat.reshape(d, d))
        kraus.append(tuple(mats))
    return LocalChannel(tuple(kraus))


def parse_state(spec: str) -> DensityMatrix:
    """Resolve a preset tag, preset:arg, or @file.json to a density matrix."""
    if spec.startswith("@"):
        return load_state_file(spec[1:])
    name, _, arg = spec.partition(":")
    try:
        if name == "bell":
            return bell_plus().to_density()
        if name == "bell-minus":
            return bell_minus().to_density()
        if name == "cc-mix":
            return cc_mix()
        if name == "werner":
            return werner(float(arg))
        if name == "pure":
            return schmidt_pure(float(arg)).to_density()
        if name == "mixed":
            return maximally_mixed(int(arg))
        if name == "ghz":
            return ghz(int(arg)).to_density()
    except ValueError as exc:
        raise DomainError(f"malformed preset argument in {spec!r}") from exc
    raise DomainError(f"unknown state spec {spec!r} (presets: bell, bell-minus, "
                      f"cc-mix, werner:F, pure:theta, mixed:d, ghz:n, or @file.json)")


def _jsonable(obj):
    """Recursively convert to JSON-encodable values; infinities become 'inf'."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [{"re": float(z.real), "im": float(z.imag)} for z in obj.ravel()]
        return [_jsonable(v) for v in obj.ravel()]
    return obj


def _entropy_fields(prefix: str, nats: float) -> dict:
    if math.isinf(nats):
        return {f"{prefix}_nats": nats, f"{prefix}_bits": nats}
    return {f"{prefix}_nats": nats, f"{prefix}_bits": nats / NATS_PER_BIT}


def _state_json(state: DensityMatrix) -> dict:
    return {"dims": list(state.dims), "matrix": _jsonable(state.mat)}


def _budget_json(budget: OptimizerBudget) -> dict:
    return {"restarts": budget.restarts, "max_iters": budget.max_iters,
            "tolerance": budget.tolerance, "seed": budget.seed}


def _budget_from(args, default: OptimizerBudget) -> OptimizerBudget:
    return OptimizerBudget(
        restarts=args.restarts if args.restarts is not None else default.restarts,
        max_iters=args.max_iters if args.max_iters is not None else default.max_iters,
        tolerance=args.tol if args.tol is not None else default.tolerance,
        seed=args.seed,
    )


def cmd_kl(args) -> dict:
    value = kl_divergence(_parse_dist(args.q), _parse_dist(args.p))
    return {"command": "kl", "q": _parse_dist(args.q), "p": _parse_dist(args.p),
            **_entropy_fields("value", value)}


def cmd_confuse_sim(args) -> dict:
    report = simulate_inference(_parse_dist(args.p), _parse_dist(args.q),
                                args.n, args.trials, args.seed, workers=args.workers)
    return {"command": "confuse-sim", "p": _parse_dist(args.p), "q": _parse_dist(args.q),
            "n": args.n, "trials": report.n_trials, "seed": args.seed,
            "n_confused": report.n_confused, "empirical_rate": report.empirical_rate,
            "exact_prob": report.exact_prob, "asymptotic_prob": report.asymptotic_prob,
            **_entropy_fields("exponent_gap", report.exponent_gap)}


def cmd_qre(args) -> dict:
    sigma = parse_state(args.sigma)
    rho = parse_state(args.rho)
    value = quantum_relative_entropy(sigma, rho)
    return {"command": "qre", "sigma": args.sigma, "rho": args.rho,
            **_entropy_fields("value", value),
            "confusion_prob": quantum_confusion_probability(sigma, rho, args.n_copies),
            "n_copies": args.n_copies}


def cmd_measured_qre(args) -> dict:
    sigma = parse_state(args.sigma)
    rho = parse_state(args.rho)
    budget = _budget_from(args, OptimizerBudget())
    if args.n_copies == 1:
        result = measured_relative_entropy(sigma, rho, budget, workers=args.workers)
    else:
        result = n_copy_measured_relative_entropy(sigma, rho, args.n_copies,
                                                  budget, workers=args.workers)
    return {"command": "measured-qre", "sigma": args.sigma, "rho": args.rho,
            "n_copies": args.n_copies, **_entropy_fields("value", result.value),
            "converged": result.converged, "n_restarts": result.n_restarts,
            "seed": args.seed, "budget": _budget_json(budget),
            "best_povm": [_jsonable(e) for e in result.best_povm.effects]}


def cmd_ree(args) -> dict:
    sigma = parse_state(args.sigma)
    from .ree import DEFAULT_REE_BUDGET
    budget = _budget_from(args, DEFAULT_REE_BUDGET)
    result = relative_entropy_of_entanglement(sigma, budget, workers=args.workers)
    certificate = {
        "dims": list(result.certificate.dims),
        "terms": [{
            "weight": term.weight,
            "factors": [
                {"kind": "pure", "dims": list(f.dims), "amplitudes": _jsonable(f.amplitudes)}
                if isinstance(f, PureState) else
                {"kind": "mixed", "dims": list(f.dims), "matrix": _jsonable(f.mat)}
                for f in term.factors],
            "grouping": [list(b) for b in term.grouping],
        } for term in result.certificate.terms],
    }
    return {"command": "ree", "sigma": args.sigma,
            **_entropy_fields("value", result.value),
            "confusion_prob": math.exp(-args.n_copies * result.value),
            "n_copies": args.n_copies, "converged": result.converged,
            "seed": args.seed, "budget": _budget_json(budget),
            "closest_state": _state_json(result.closest_state),
            "certificate": certificate}


def cmd_ppt(args) -> dict:
    report = ppt_test(parse_state(args.rho))
    return {"command": "ppt", "rho": args.rho, "is_ppt": report.is_ppt,
            "min_eigenvalue": report.min_eigenvalue, "conclusive": report.conclusive}


def cmd_locc_check(args) -> dict:
    sigma = parse_state(args.sigma)
    channel = load_channel_file(args.channel_file)
    from .ree import DEFAULT_REE_BUDGET
    budget = _budget_from(args, DEFAULT_REE_BUDGET)
    before = relative_entropy_of_entanglement(sigma, budget, workers=args.workers)
    mapped = apply_channel_to_density(sigma, channel)
    after = relative_entropy_of_entanglement(mapped, budget, workers=args.workers)
    return {"command": "locc-check", "sigma": args.sigma,
            "channel_file": args.channel_file,
            **_entropy_fields("value_before", before.value),
            **_entropy_fields("value_after", after.value),
            "delta_nats": after.value - before.value,
            "non_increasing_within_slack": after.value <= before.value + args.slack,
            "slack": args.slack, "seed": args.seed, "budget": _budget_json(budget)}


_COMMANDS = {
    "kl": cmd_kl,
    "confuse-sim": cmd_confuse_sim,
    "qre": cmd_qre,
    "measured-qre": cmd_measured_qre,
    "ree": cmd_ree,
    "ppt": cmd_ppt,
    "locc-check": cmd_locc_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=_default_seed(),
                        help="RNG seed (default: RELENT_SEED or 0)")
    common.add_argument("--workers", type=int, default=1,
                        help="worker threads; results are worker-count independent")
    common.add_argument("--csv", action="store_true",
                        help="emit flattened scalar fields as CSV instead of JSON")
    common.add_argument("--sweep", metavar="NAME=A:B:STEP", default=None,
                        help="repeat over a grid, substituting {NAME} in arguments; "
                             "emits CSV")

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--restarts", type=int, default=None)
    budget.add_argument("--max-iters", type=int, default=None)
    budget.add_argument("--tol", type=float, default=None)

    parser = argparse.ArgumentParser(prog="relent",
                                     description="relative-entropy distinguishability "
                                                 "of states and entanglement")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kl", parents=[common], help="classical relative entropy")
    p.add_argument("--q", required=True, help="inferred distribution, e.g. 0.7,0.3")
    p.add_argument("--p", required=True, help="true distribution, e.g. 0.5,0.5")

    p = sub.add_parser("confuse-sim", parents=[common],
                       help="Monte Carlo confusion of two coins")
    p.add_argument("--p", required=True, help="true binary distribution")
    p.add_argument("--q", required=True, help="target inferred distribution")
    p.add_argument("--n", type=int, required=True, help="tosses per experiment")
    p.add_argument("--trials", type=int, required=True, help="number of experiments")

    p = sub.add_parser("qre", parents=[common], help="quantum relative entropy")
    p.add_argument("--sigma", required=True)
    p.add_argument("--rho", required=True)
    p.add_argument("--n-copies", type=int, default=1,
                   help="copies for the confusion probability")

    p = sub.add_parser("measured-qre", parents=[common, budget],
                       help="measured relative entropy via POVM optimization")
    p.add_argument("--sigma", required=True)
    p.add_argument("--rho", required=True)
    p.add_argument("--n-copies", type=int, default=1)

    p = sub.add_parser("ree", parents=[common, budget],
                       help="relative entropy of entanglement")
    p.add_argument("--sigma", required=True)
    p.add_argument("--n-copies", type=int, default=1,
                   help="copies for the confusion probability")

    p = sub.add_parser("ppt", parents=[common], help="partial-transpose separability test")
    p.add_argument("--rho", required=True)

    p = sub.add_parser("locc-check", parents=[common, budget],
                       help="entanglement before and after a local channel")
    p.add_argument("--sigma", required=True)
    p.add_argument("--channel-file", required=True)
    p.add_argument("--slack", type=float, default=0.02,
                   help="tolerance for the non-increase verdict")

    return parser


def _flatten_scalars(report: dict) -> dict:
    flat = {}
    for key, value in report.items():
        if key == "timestamp":
            continue
        if isinstance(value, (int, float, str, bool)):
            flat[key] = value
    return flat


def _emit_csv(rows: list[dict]) -> None:
    header: list[str] = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    out = [",".join(header)]
    for row in rows:
        out.append(",".join("" if key not in row else str(row[key]) for key in header))
    sys.stdout.write("\n".join(out) + "\n")


def _parse_sweep(spec: str):
    try:
        name, _, grid = spec.partition("=")
        a, b, step = (float(tok) for tok in grid.split(":"))
    except ValueError as exc:
        raise DomainError(f"malformed sweep spec {spec!r}, expected NAME=A:B:STEP") from exc
    if step <= 0:
        raise DomainError("sweep step must be positive")
    values = []
    v = a
    while v <= b + step * 1e-9:
        values.append(round(v, 12))
        v += step
    return name.strip(), values


def _run_report(argv: list[str]) -> tuple[dict, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    report = _COMMANDS[args.command](args)
    report["timestamp"] = time.time()
    return report, args


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        if "--sweep" in argv:
            at = argv.index("--sweep")
            spec = argv[at + 1] if at + 1 < len(argv) else ""
            rest = argv[:at] + argv[at + 2:]
            name, values = _parse_sweep(spec)
            rows = []
            for v in values:
                sub_argv = [tok.replace("{" + name + "}", f"{v:.12g}") for tok in rest]
                report, _ = _run_report(sub_argv)
                rows.append({name: f"{v:.12g}", **_flatten_scalars(_jsonable(report))})
            _emit_csv(rows)
            return 0
        report, args = _run_report(argv)
        payload = _jsonable(report)
        if args.csv:
            _emit_csv([_flatten_scalars(payload)])
        else:
            sys.stdout.write(json.dumps(payload) + "\n")
        return 0
    except UnsupportedConfigError as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return 3
    except ValidationError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "invariant": exc.invariant}) + "\n")
        return 2
    except RelentError as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

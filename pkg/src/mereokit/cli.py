"""Batch experiment runner.

One executable, one subcommand per experiment, JSON/CSV outputs. Every
output embeds the resolved config that produced it, and the seed fully
determines all randomness, so identical configs give byte-identical
numeric payloads.

Exit codes: 0 success, 1 usage or parse error, 2 declared non-convergence,
3 spectral-hypothesis violation.

Subcommands and their config fields are documented in the README.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dynamics, kinds, locality, models
from . import tps as tps_mod
from .search import SearchConfig
from .search import search as run_search
from .errors import HypothesisViolation, MereokitError, NoWitnessError
from .hilbert import Dims, HermitianOp, StateVec, UnitaryOp, expm_i, haar_state, haar_unitary, kron_all
from .rng import stream

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_HYPOTHESIS = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# config plumbing


def _load_json(path: str) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"parse error in {path}: line {e.lineno} column {e.colno}: {e.msg}")


def _resolve_seed(args, cfg: dict) -> int:
    if args.seed is not None:
        return int(args.seed)
    if "seed" in cfg:
        return int(cfg["seed"])
    env = os.environ.get("MEREOKIT_SEED")
    return int(env) if env is not None else 0


def _dump_json(payload: dict, out: str | None):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump_csv(header: str, rows, config: dict, out: str | None):
    lines = ["# config=" + json.dumps(config, sort_keys=True), header]
    lines += [",".join(repr(x) if isinstance(x, float) else str(x) for x in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _complex_pairs(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def load_matrix_file(path: str) -> tuple[np.ndarray, Dims]:
    obj = _load_json(path)
    for key in ("dims", "matrix"):
        if key not in obj:
            raise UsageError(f"matrix file {path} is missing the {key!r} field")
    dims = Dims(tuple(obj["dims"]))
    mat = _complex_pairs(obj["matrix"])
    if mat.shape != (dims.total, dims.total):
        raise UsageError(f"matrix shape {mat.shape} inconsistent with dims {dims.factors}")
    return mat, dims


def save_matrix_file(path: str, mat: np.ndarray, dims: Dims):
    obj = {
        "dims": list(dims.factors),
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in mat],
    }
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _model_cfg(cfg: dict) -> dict:
    if "model" in cfg:
        return cfg["model"]
    if "file" in cfg:
        return {"file": cfg["file"]}
    raise UsageError("config needs a 'model' or 'file' entry")


def build_model(cfg: dict, seed: int) -> tuple[HermitianOp, Dims]:
    """Hamiltonian named in a config: a builtin model or a matrix file."""
    if "file" in cfg:
        mat, dims = load_matrix_file(cfg["file"])
        return HermitianOp(mat), dims
    name = cfg.get("name")
    if name == "ising":
        p = models.IsingParams(int(cfg["n"]), float(cfg["J"]), float(cfg["h"]))
        return models.ising_chain(p), Dims((2,) * p.n)
    if name == "pauli":
        H = models.pauli_string(cfg["string"])
        return H, Dims((2,) * len(cfg["string"]))
    if name == "random_klocal":
        dims = Dims(tuple(cfg["dims"]))
        return models.random_klocal(dims, int(cfg["K"]), stream(seed, 1)), dims
    if name == "scrambled_klocal":
        dims = Dims(tuple(cfg["dims"]))
        H, _ = models.scrambled_klocal(dims, int(cfg["K"]), stream(seed, 1))
        return H, dims
    if name == "gue":
        dims = Dims(tuple(cfg["dims"]))
        rng = stream(seed, 1)
        A = rng.standard_normal((dims.total,) * 2) + 1j * rng.standard_normal((dims.total,) * 2)
        return HermitianOp((A + A.conj().T) / 2), dims
    raise UsageError(f"unknown model {cfg!r}")


def build_tps(spec, dims: Dims, seed: int, base: tps_mod.Tps, H: HermitianOp | None):
    """TPS named in a config; 'local' and 'evolved' are relative to ``base``."""
    if spec == "canonical" or spec is None:
        return tps_mod.canonical(dims)
    if spec == "jw_dual":
        if set(dims.factors) != {2}:
            raise UsageError("jw_dual requires qubit factors")
        return models.jw_dual_tps(dims.n)
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "random":
            return tps_mod.random_tps(dims, stream(seed, 2))
        if kind == "file":
            return tps_mod.tps_from_json(_load_json(spec["path"]))
        if kind == "local":
            rng = stream(seed, 3)
            locals_ = kron_all([haar_unitary(d, rng).mat for d in dims.factors])
            U = UnitaryOp(base.iso.mat.conj().T @ locals_ @ base.iso.mat)
            return tps_mod.act(U, base)
        if kind == "evolved":
            if H is None:
                raise UsageError("an evolved tps needs a model in the config")
            return tps_mod.act(expm_i(H, float(spec["t"])), base)
    raise UsageError(f"unknown tps spec {spec!r}")


def build_state(spec, dims: Dims, seed: int) -> StateVec:
    if spec == "haar" or spec is None:
        return haar_state(dims.total, stream(seed, 4))
    if isinstance(spec, list):
        v = np.array([complex(re, im) for re, im in spec])
        return StateVec(v / np.linalg.norm(v))
    raise UsageError(f"unknown state spec {spec!r}")


def _site_kets(spec, dims: Dims) -> list[np.ndarray]:
    if spec == "zeros" or spec is None:
        kets = []
        for d in dims.factors:
            v = np.zeros(d, dtype=complex)
            v[0] = 1.0
            kets.append(v)
        return kets
    if spec == "plus":
        return [np.ones(d, dtype=complex) / np.sqrt(d) for d in dims.factors]
    if isinstance(spec, list):
        return [_complex_pairs([row])[0] for row in spec]
    raise UsageError(f"unknown probe spec {spec!r}")


def _time_grid(cfg, H: HermitianOp) -> np.ndarray:
    grid = cfg.get("grid") or {}
    points = int(grid.get("points", 64))
    if "t_max" in grid:
        return np.arange(points) * float(grid["t_max"]) / points
    return dynamics.default_time_grid(H, points)


# ---------------------------------------------------------------------------
# subcommands


def cmd_profile(args) -> int:
    cfg = _load_json(args.config)
    seed = _resolve_seed(args, cfg)
    tol = args.tol if args.tol is not None else float(cfg.get("tol", locality.LOCALITY_RTOL))
    H, dims = build_model(_model_cfg(cfg), seed)
    T = build_tps(cfg.get("tps"), dims, seed, tps_mod.canonical(dims), H)
    report = locality.locality_report(H, T, tol)
    payload = {"config": {**cfg, "seed": seed, "tol": tol}, "report": report.to_json()}
    _dump_json(payload, args.out)
    return EXIT_OK


def cmd_orbit(args) -> int:
    cfg = _load_json(args.config)
    seed = _resolve_seed(args, cfg)
    H, dims = build_model(_model_cfg(cfg), seed)
    T = build_tps(cfg.get("tps"), dims, seed, tps_mod.canonical(dims), H)
    probe = tps_mod.product_state_in(T, _site_kets(cfg.get("probe"), dims))
    site = int(cfg.get("site", 0))
    grid = _time_grid(cfg, H)
    curve = dynamics.entropy_orbit(H, T, probe, site, grid)
    bin_ = float(cfg.get("bin", 1e-4))
    resolved = {**cfg, "seed": seed}
    _dump_csv("t,entropy", curve.to_csv_rows(), resolved, args.out)
    summary = {
        "config": resolved,
        "site": site,
        "points": len(grid),
        "bin": bin_,
        "distinct_values": dynamics.distinct_value_count(curve, bin_),
        "max_entropy": float(curve.entropies.max()),
    }
    summary_path = (args.out + ".summary.json") if args.out else None
    _dump_json(summary, summary_path)
    return EXIT_OK


def cmd_fingerprint(args) -> int:
    cfg = _load_json(args.config)
    seed = _resolve_seed(args, cfg)
    tol = args.tol if args.tol is not None else float(cfg.get("tol", 1e-7))
    H, dims = build_model(_model_cfg(cfg), seed)
    psi = build_state(cfg.get("state"), dims, seed)
    T1 = build_tps(cfg.get("tps1"), dims, seed, tps_mod.canonical(dims), H)
    T2 = build_tps(cfg.get("tps2"), dims, seed, T1, H)
    count = cfg.get("probe_count")
    probes = kinds.build_probe_set(H, psi, int(count) if count else None, stream(seed, 5))
    f1 = kinds.fingerprint(H, psi, T1, probes)
    f2 = kinds.fingerprint(H, psi, T2, probes)
    verdict = kinds.cross_validate_tps(H, psi, T1, T2, probes, tol)
    payload = {
        "config": {**cfg, "seed": seed, "tol": tol},
        "verdict": verdict.value,
        "fingerprint_distance": kinds.fingerprint_distance(f1, f2),
        "tps_equal": bool(tps_mod.equivalent(T1, T2)),
        "probes": len(probes),
    }
    _dump_json(payload, args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    cfg = _load_json(args.config)
    seed = _resolve_seed(args, cfg)
    H, dims = build_model(_model_cfg(cfg), seed)
    sc = cfg.get("search", {})
    config = SearchConfig(
        K=int(sc.get("K", 2)),
        restarts=int(sc.get("restarts", 8)),
        max_iters=int(sc.get("max_iters", 500)),
        grad_tol=float(sc.get("grad_tol", 1e-9)),
        step_init=float(sc.get("step_init", 1.0)),
        armijo_c=float(sc.get("armijo_c", 1e-4)),
        backtrack_ratio=float(sc.get("backtrack_ratio", 0.5)),
        success_residual=float(sc.get("success_residual", 1e-6)),
        seed=seed,
    )
    result = run_search(H, dims, config)
    resolved = {**cfg, "seed": seed}
    payload = {"config": resolved, "result": result.to_json()}
    _dump_json(payload, args.out)
    if args.out:
        _dump_csv(
            "iteration,residual",
            [(int(i), float(r)) for i, r in result.trace],
            resolved,
            args.out + ".trace.csv",
        )
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _kinds_pair(cfg_pair, seed: int, path: int):
    H, dims = build_model(_model_cfg(cfg_pair), seed)
    psi = build_state(cfg_pair.get("state"), dims, seed + path)
    return H, psi


def cmd_kinds(args) -> int:
    cfg = _load_json(args.config)
    seed = _resolve_seed(args, cfg)
    tol = args.tol if args.tol is not None else float(cfg.get("tol", 1e-8))
    mode = cfg.get("mode", "hsf")
    resolved = {**cfg, "seed": seed, "tol": tol}
    if mode == "hsf":
        H1, psi1 = _kinds_pair(cfg["pair1"], seed, 0)
        if cfg.get("pair2") == "conjugated":
            V = haar_unitary(H1.dim, stream(seed, 6))
            H2 = HermitianOp(V.mat @ H1.mat @ V.mat.conj().T)
            psi2 = StateVec(V.mat @ psi1.vec)
        else:
            H2, psi2 = _kinds_pair(cfg["pair2"], seed, 1)
        try:
            U = kinds.pair_orbit_witness(H1, psi1, H2, psi2, tol)
        except NoWitnessError as e:
            _dump_json({"config": resolved, "witness": None, "reason": str(e)}, args.out)
            return EXIT_OK
        residual_h = float(np.abs(U.mat @ H1.mat @ U.mat.conj().T - H2.mat).max())
        residual_psi = float(np.linalg.norm(U.mat @ psi1.vec - psi2.vec))
        payload = {
            "config": resolved,
            "witness": [[[z.real, z.imag] for z in row] for row in U.mat],
            "residual_operator": residual_h,
            "residual_state": residual_psi,
        }
        _dump_json(payload, args.out)
        return EXIT_OK
    if mode == "gram":
        fam1 = _build_family(cfg["family1"], seed, 7)
        spec2 = cfg["family2"]
        if spec2 == "rotated":
            V = haar_unitary(fam1.shape[1], stream(seed, 8))
            fam2 = fam1 @ V.mat.T
        else:
            fam2 = _build_family(spec2, seed, 9)
        try:
            U = kinds.gram_orbit_witness(list(fam1), list(fam2), tol)
        except NoWitnessError as e:
            _dump_json({"config": resolved, "witness": None, "reason": str(e)}, args.out)
            return EXIT_OK
        residual = float(max(np.linalg.norm(U.mat @ a - b) for a, b in zip(fam1, fam2)))
        payload = {
            "config": resolved,
            "witness": [[[z.real, z.imag] for z in row] for row in U.mat],
            "residual": residual,
        }
        _dump_json(payload, args.out)
        return EXIT_OK
    raise UsageError(f"unknown kinds mode {mode!r}")


def _build_family(spec, seed: int, path: int) -> np.ndarray:
    if isinstance(spec, dict) and "random" in spec:
        r = spec["random"]
        rng = stream(seed, path)
        return rng.standard_normal((int(r["count"]), int(r["dim"]))) + 1j * rng.standard_normal(
            (int(r["count"]), int(r["dim"]))
        )
    if isinstance(spec, list):
        return _complex_pairs(spec)
    raise UsageError(f"unknown family spec {spec!r}")


def cmd_dualscan(args) -> int:
    cfg = _load_json(args.config)
    seed = _resolve_seed(args, cfg)
    tol = args.tol if args.tol is not None else float(cfg.get("tol", 1e-7))
    dims = Dims(tuple(cfg.get("dims", [2, 2])))
    trials = int(cfg.get("trials", 10))
    t_values = [float(t) for t in cfg.get("t_values", [0.3, 0.7, 1.1])]
    count = cfg.get("probe_count")
    rows = []
    tally = {v.value: 0 for v in kinds.TpsVerdict}
    for trial in range(trials):
        H, psi, T1 = _dualscan_instance(dims, seed, trial)
        probes = kinds.build_probe_set(H, psi, int(count) if count else None, stream(seed, trial, 1))
        cases = [("local", _local_move(T1, seed, trial))]
        cases += [(f"evolved:{t!r}", tps_mod.act(expm_i(H, t), T1)) for t in t_values]
        for label, T2 in cases:
            f1 = kinds.fingerprint(H, psi, T1, probes)
            f2 = kinds.fingerprint(H, psi, T2, probes)
            fp_eq = kinds.fingerprints_equal(f1, f2, tol)
            tps_eq = tps_mod.equivalent(T1, T2)
            verdict = kinds.cross_validate_tps(H, psi, T1, T2, probes, tol)
            tally[verdict.value] += 1
            rows.append(
                (trial, label, fp_eq, tps_eq, verdict.value, kinds.fingerprint_distance(f1, f2))
            )
    resolved = {**cfg, "seed": seed, "tol": tol}
    rows.append(("summary", "", "", "", json.dumps(tally, sort_keys=True).replace(",", ";"), 0.0))
    _dump_csv("trial,case,fingerprints_equal,tps_equal,verdict,fingerprint_distance", rows, resolved, args.out)
    return EXIT_OK


def _dualscan_instance(dims: Dims, seed: int, trial: int):
    # resample (deterministically) until the spectral hypotheses hold
    for attempt in range(64):
        rng = stream(seed, trial, attempt)
        D = dims.total
        A = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
        H = HermitianOp((A + A.conj().T) / 2)
        psi = haar_state(D, rng)
        lam, V = np.linalg.eigh(H.mat)
        if np.diff(lam).min() <= kinds.DEGENERACY_GAP:
            continue
        if np.abs(V.conj().T @ psi.vec).min() <= kinds.SUPPORT_MIN:
            continue
        return H, psi, tps_mod.random_tps(dims, rng)
    raise MereokitError("could not draw a non-degenerate, full-support instance")


def _local_move(T1: tps_mod.Tps, seed: int, trial: int) -> tps_mod.Tps:
    rng = stream(seed, trial, 100)
    locals_ = kron_all([haar_unitary(d, rng).mat for d in T1.dims.factors])
    return tps_mod.act(UnitaryOp(T1.iso.mat.conj().T @ locals_ @ T1.iso.mat), T1)


# ---------------------------------------------------------------------------
# entry


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", required=True, help="path to the JSON experiment config")
    p.add_argument("--seed", type=int, default=None, help="seed override (also MEREOKIT_SEED)")
    p.add_argument("--out", default=None, help="output path; stdout when omitted")
    p.add_argument("--format", choices=["json", "csv"], default=None, help="output format hint")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")


def main(argv=None) -> int:
    parser = _Parser(prog="mereokit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "profile": cmd_profile,
        "orbit": cmd_orbit,
        "fingerprint": cmd_fingerprint,
        "search": cmd_search,
        "kinds": cmd_kinds,
        "dualscan": cmd_dualscan,
    }
    for name in handlers:
        _add_common(sub.add_parser(name))
    try:
        args = parser.parse_args(argv)
        return handlers[args.command](args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except HypothesisViolation as e:
        report = {"error": "hypothesis_violation", "reason": e.reason, "detail": str(e)}
        print(json.dumps(report, sort_keys=True), file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (MereokitError, FileNotFoundError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()

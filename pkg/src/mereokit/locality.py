"""K-locality predicates and the checks tying locality to conjugation and time evolution."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvariantViolation
from .hilbert import HermitianOp, StateVec, UnitaryOp, hs_norm_sq, site_entropies
from .basis import WeightProfile, decompose, weight_profile
from .tps import Tps, act

LOCALITY_RTOL = 1e-9  # default threshold on residual weight, relative to |H|_HS^2
WITNESS_ENTROPY = 1e-6  # site entropy above this witnesses entanglement generation
PRODUCT_PROBE_TOL = 1e-9  # max site entropy for a probe to count as a product state


@dataclass(frozen=True)
class LocalityReport:
    profile: WeightProfile
    min_k: int
    tol: float

    def to_json(self) -> dict:
        return {
            "min_k": int(self.min_k),
            "tol": float(self.tol),
            "weights": [float(x) for x in self.profile.w],
        }


def _profile(H: HermitianOp, T: Tps) -> WeightProfile:
    return weight_profile(decompose(H, T))


def locality_report(H: HermitianOp, T: Tps, tol: float = LOCALITY_RTOL) -> LocalityReport:
    """Weight profile plus the smallest K whose tail weight is below tol."""
    prof = _profile(H, T)
    cut = tol * hs_norm_sq(H)
    above = [k for k in range(1, T.dims.n + 1) if prof.w[k] > cut]
    return LocalityReport(prof, max(above) if above else 0, tol)


def is_k_local(H: HermitianOp, T: Tps, K: int, tol: float = LOCALITY_RTOL) -> bool:
    """True iff the weight above K is at most tol * |H|_HS^2."""
    if not (1 <= K <= T.dims.n):
        raise DimensionMismatch(f"K={K} out of range 1..{T.dims.n}")
    prof = _profile(H, T)
    return float(prof.w[K + 1 :].sum()) <= tol * hs_norm_sq(H)


def conjugation_covariance_check(
    H: HermitianOp, T: Tps, U: UnitaryOp, tol: float = LOCALITY_RTOL
) -> bool:
    """Profiles of (H, T) and (U H U^dag, pushed T) must agree entrywise."""
    p1 = _profile(H, T)
    p2 = _profile(HermitianOp(U.mat @ H.mat @ U.mat.conj().T), act(U, T))
    return bool(np.abs(p1.w - p2.w).max() <= tol * (1.0 + hs_norm_sq(H)))


@dataclass(frozen=True)
class EvolutionWitness:
    t: float
    probe_index: int
    entropy: float


@dataclass(frozen=True)
class EvolutionVerdict:
    """Outcome of scanning a time grid for entanglement generation.

    ``consistent`` means no witness was found on the grid; it is evidence,
    not proof, so the largest site entropy seen is reported alongside.
    """

    consistent: bool
    witness: Optional[EvolutionWitness]
    max_entropy: float


def _require_product_probes(T: Tps, probes: Sequence[StateVec], tol: float):
    for j, probe in enumerate(probes):
        if probe.dim != T.dims.total:
            raise DimensionMismatch(f"probe {j} has dim {probe.dim} != {T.dims.total}")
        ent = site_entropies(T.iso.mat @ probe.vec, T.dims).max()
        if ent > tol:
            raise InvariantViolation(f"probe {j} is not a product state (entropy {ent:.3e})")


def one_local_evolution_check(
    H: HermitianOp,
    T: Tps,
    t_grid: Sequence[float],
    probes: Sequence[StateVec],
    witness_threshold: float = WITNESS_ENTROPY,
    product_tol: float = PRODUCT_PROBE_TOL,
) -> EvolutionVerdict:
    """Scan evolved product probes for entanglement in T.

    Product states stay product under evolution exactly when H acts as a sum
    of single-site terms, so the first probe whose marginal entropy exceeds
    the threshold witnesses that H is not 1-local. The scan order is
    (t index, probe index), so the reported witness is deterministic.
    """
    _require_product_probes(T, probes, product_tol)
    lam, V = np.linalg.eigh(H.mat)
    iso = T.iso.mat
    max_seen = 0.0
    for t in t_grid:
        phases = np.exp(-1j * float(t) * lam)
        for j, probe in enumerate(probes):
            evolved = V @ (phases * (V.conj().T @ probe.vec))
            ent = float(site_entropies(iso @ evolved, T.dims).max())
            max_seen = max(max_seen, ent)
            if ent > witness_threshold:
                return EvolutionVerdict(False, EvolutionWitness(float(t), j, ent), max_seen)
    return EvolutionVerdict(True, None, max_seen)

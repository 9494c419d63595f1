"""Orbit classes of (Hamiltonian, state) pairs and entanglement fingerprints.

Two pairs with the same spectrum and the same eigenspace weights of the
state are always related by a unitary, and the witness is pinned uniquely
(up to a global phase) when the spectrum is simple and every weight is
nonzero. Under those same conditions the polynomial probe states R(H)|psi>
span the whole space, so their per-site entropies with respect to a
structure separate inequivalent structures; ``cross_validate_tps`` checks
that separation against the direct equivalence test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    DimensionMismatch,
    HypothesisViolation,
    IncomparableFingerprints,
    InvariantViolation,
    NoWitnessError,
)
from .hilbert import HermitianOp, StateVec, UnitaryOp, _vec, site_entropies
from .tps import Tps, equivalent

DEGENERACY_GAP = 1e-8  # minimum eigenvalue gap for a spectrum to count as simple
SUPPORT_MIN = 1e-8  # minimum |<eigvec|psi>| for full support
GROUPING_TOL = 1e-9  # eigenvalues closer than this share an eigenspace
SKIP_NORM = 1e-10  # probe states below this norm are skipped, not normalized


@dataclass(frozen=True)
class SpectrumSpec:
    """Sorted eigenvalue list, with multiplicity."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise InvariantViolation("spectrum values must be sorted ascending")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class ProjectionSpec:
    """Probability weights on the eigenspaces; non-negative, summing to 1."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        if any(x < 0 for x in lam):
            raise InvariantViolation("weights must be non-negative")
        if abs(sum(lam) - 1.0) > 1e-9:
            raise InvariantViolation(f"weights sum to {sum(lam)!r}, not 1")
        object.__setattr__(self, "lambdas", lam)


def _group_starts(values: Sequence[float], tol: float = GROUPING_TOL) -> list[int]:
    starts = [0]
    for k in range(1, len(values)):
        if values[k] - values[k - 1] > tol:
            starts.append(k)
    return starts


@dataclass(frozen=True)
class PairKindSpec:
    """Class label for (Hermitian, state) pairs: spectrum plus eigenspace weights."""

    spectrum: SpectrumSpec
    weights: ProjectionSpec

    def __post_init__(self):
        groups = len(_group_starts(self.spectrum.values))
        if groups != len(self.weights.lambdas):
            raise DimensionMismatch(
                f"{len(self.weights.lambdas)} weights for {groups} eigenspaces"
            )

    def to_json(self) -> dict:
        return {
            "spectrum": [float(v) for v in self.spectrum.values],
            "weights": [float(x) for x in self.weights.lambdas],
        }


def _eigenspace_weights(values: np.ndarray, amplitudes: np.ndarray) -> np.ndarray:
    starts = _group_starts(values) + [len(values)]
    mags = np.abs(amplitudes) ** 2
    return np.array([mags[a:b].sum() for a, b in zip(starts, starts[1:])])


def pair_kind_of(H: HermitianOp, psi: StateVec) -> PairKindSpec:
    """The class label realized by a concrete pair."""
    lam, V = np.linalg.eigh(H.mat)
    w = _eigenspace_weights(lam, V.conj().T @ psi.vec)
    w = w / w.sum()
    return PairKindSpec(SpectrumSpec(tuple(lam)), ProjectionSpec(tuple(w)))


def pair_membership(
    H: HermitianOp, psi: StateVec, spec: PairKindSpec, tol: float = 1e-8
) -> bool:
    """Does (H, psi) match the spectrum and eigenspace weights of ``spec``?"""
    if H.dim != psi.dim:
        raise DimensionMismatch(f"operator dim {H.dim} != state dim {psi.dim}")
    if H.dim != len(spec.spectrum.values):
        return False
    lam, V = np.linalg.eigh(H.mat)
    if np.abs(lam - np.array(spec.spectrum.values)).max() > tol:
        return False
    starts = _group_starts(spec.spectrum.values) + [len(lam)]
    mags = np.abs(V.conj().T @ psi.vec) ** 2
    got = np.array([mags[a:b].sum() for a, b in zip(starts, starts[1:])])
    return bool(np.abs(got - np.array(spec.weights.lambdas)).max() <= tol)


def pair_orbit_witness(
    H1: HermitianOp,
    psi1: StateVec,
    H2: HermitianOp,
    psi2: StateVec,
    tol: float = 1e-8,
) -> UnitaryOp:
    """Unitary U with U H1 U^dag = H2 and U psi1 = psi2.

    Requires a simple spectrum (otherwise the eigenbasis is ambiguous) and
    full support of both states on it (the per-eigenvector phases are read
    off the amplitude ratios, which pins U completely).
    """
    lam1, V1 = np.linalg.eigh(H1.mat)
    lam2, V2 = np.linalg.eigh(H2.mat)
    if len(lam1) != len(lam2):
        raise DimensionMismatch("operator dimensions differ")
    gap = min(np.diff(lam1).min(), np.diff(lam2).min()) if len(lam1) > 1 else np.inf
    if gap <= DEGENERACY_GAP:
        raise HypothesisViolation(
            "degenerate_spectrum",
            f"eigenvalue gap {gap:.3e} below {DEGENERACY_GAP:.0e}; eigenbasis ambiguous",
        )
    if np.abs(lam1 - lam2).max() > tol:
        raise NoWitnessError("spectra differ; no conjugating unitary exists")
    c1 = V1.conj().T @ psi1.vec
    c2 = V2.conj().T @ psi2.vec
    low = min(np.abs(c1).min(), np.abs(c2).min())
    if low <= SUPPORT_MIN:
        raise HypothesisViolation(
            "zero_projection",
            f"state overlap {low:.3e} with some eigenvector below {SUPPORT_MIN:.0e}",
        )
    if np.abs(np.abs(c1) ** 2 - np.abs(c2) ** 2).max() > tol:
        raise NoWitnessError("eigenspace weights differ; pairs lie on different orbits")
    phases = c2 / c1
    phases = phases / np.abs(phases)
    return UnitaryOp((V2 * phases) @ V1.conj().T)


@dataclass(frozen=True)
class GramSpec:
    """Pairwise inner products of a family of vectors; Hermitian PSD."""

    matrix: np.ndarray

    def __post_init__(self):
        g = np.array(self.matrix, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionMismatch(f"Gram matrix must be square, got {g.shape}")
        if np.abs(g - g.conj().T).max() > 1e-10 * (1.0 + np.abs(g).max()):
            raise InvariantViolation("Gram matrix not Hermitian")
        if g.size and np.linalg.eigvalsh(g).min() < -1e-10 * (1.0 + np.abs(g).max()):
            raise InvariantViolation("Gram matrix not positive semidefinite")
        g.setflags(write=False)
        object.__setattr__(self, "matrix", g)

    def to_json(self) -> list:
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]


def gram_matrix(family: Sequence) -> GramSpec:
    vecs = [np.asarray(_vec(v)) for v in family]
    g = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
    return GramSpec(g)


def _orthonormalize_by_gram(G: np.ndarray):
    """Gram-Schmidt expansion coefficients computed from the Gram matrix alone.

    Returns (C, kept): rows of C express the orthonormal vectors in terms of
    the family, and kept lists the surviving (independent) member indices.
    The coefficients depend only on G, so two families with equal Gram
    matrices orthonormalize identically.
    """
    N = G.shape[0]
    C_rows: list[np.ndarray] = []
    kept: list[int] = []
    scale = max(float(np.abs(np.diag(G)).max()), 1e-300)
    for k in range(N):
        row = np.zeros(N, dtype=complex)
        row[k] = 1.0
        for _ in range(2):  # re-orthogonalization pass for stability
            for c in C_rows:
                row = row - (c.conj() @ G @ row) * c
        nrm2 = float((row.conj() @ G @ row).real)
        if nrm2 <= 1e-20 * scale:
            continue
        C_rows.append(row / math.sqrt(nrm2))
        kept.append(k)
    return C_rows, kept


def _complete_basis(rows: list[np.ndarray], D: int) -> np.ndarray:
    """Extend orthonormal rows to a full basis using canonical vectors in index order."""
    out = list(rows)
    for j in range(D):
        if len(out) == D:
            break
        w = np.zeros(D, dtype=complex)
        w[j] = 1.0
        for _ in range(2):
            for r in out:
                w = w - np.vdot(r, w) * r
        nrm = np.linalg.norm(w)
        if nrm > 1e-6:
            out.append(w / nrm)
    return np.stack(out)


def gram_orbit_witness(family1: Sequence, family2: Sequence, tol: float = 1e-8) -> UnitaryOp:
    """Unitary mapping family1 onto family2, member by member.

    Exists exactly when the Gram matrices agree: both families are
    orthonormalized with the shared Gram coefficients, the resulting bases
    are mapped onto each other, and the map is completed deterministically
    on the orthogonal complements.
    """
    F1 = np.stack([np.asarray(_vec(v)) for v in family1])
    F2 = np.stack([np.asarray(_vec(v)) for v in family2])
    if F1.shape != F2.shape:
        raise DimensionMismatch(f"family shapes differ: {F1.shape} vs {F2.shape}")
    G1 = gram_matrix(family1).matrix
    G2 = gram_matrix(family2).matrix
    if np.abs(G1 - G2).max() > tol:
        raise NoWitnessError("Gram matrices differ; no unitary can match the families")
    C_rows, _ = _orthonormalize_by_gram(G1)
    D = F1.shape[1]
    B1 = _complete_basis([c @ F1 for c in C_rows], D)
    B2 = _complete_basis([c @ F2 for c in C_rows], D)
    return UnitaryOp(B2.T @ B1.conj())


@dataclass(frozen=True)
class ProbeSet:
    """Polynomials whose evaluations on (H, psi) probe every direction of the space.

    ``polys[r]`` holds ascending coefficients; ``provenance[r]`` records
    whether the polynomial interpolates one eigenvector or was drawn with
    rational coefficients from a seeded stream.
    """

    polys: tuple[np.ndarray, ...]
    provenance: tuple[str, ...]

    def __post_init__(self):
        polys = tuple(np.asarray(p, dtype=complex) for p in self.polys)
        if len(polys) != len(self.provenance):
            raise DimensionMismatch("one provenance tag per polynomial required")
        object.__setattr__(self, "polys", polys)

    def __len__(self) -> int:
        return len(self.polys)


def build_probe_set(
    H: HermitianOp,
    psi: StateVec,
    count: Optional[int] = None,
    stream: Optional[np.random.Generator] = None,
) -> ProbeSet:
    """Interpolation probes for every eigenvector plus seeded rational extras.

    Refuses, naming the failed condition, when the spectrum is (nearly)
    degenerate or the state misses an eigenvector: in either case the probe
    states cannot span the space.
    """
    lam, V = np.linalg.eigh(H.mat)
    D = len(lam)
    gap = float(np.diff(lam).min()) if D > 1 else np.inf
    if gap <= DEGENERACY_GAP:
        raise HypothesisViolation(
            "degenerate_spectrum",
            f"eigenvalue gap {gap:.3e} below {DEGENERACY_GAP:.0e}; probes cannot span",
        )
    c = V.conj().T @ psi.vec
    low = float(np.abs(c).min())
    if low <= SUPPORT_MIN:
        raise HypothesisViolation(
            "zero_projection",
            f"state overlap {low:.3e} with eigenvector {int(np.abs(c).argmin())} "
            f"below {SUPPORT_MIN:.0e}; probes cannot span",
        )
    if count is None:
        count = 2 * D
    if count < D:
        raise DimensionMismatch(f"need at least {D} probes, got {count}")
    if count > D and stream is None:
        raise DimensionMismatch("a stream is required to draw the extra polynomials")
    polys: list[np.ndarray] = []
    provenance: list[str] = []
    for k in range(D):
        roots = np.delete(lam, k)
        p = npoly.polyfromroots(roots).astype(complex)
        p = p / npoly.polyval(lam[k], p)
        polys.append(p)
        provenance.append(f"interpolation:{k}")
    for r in range(count - D):
        num = stream.integers(-12, 13, size=(2, D))
        den = stream.integers(1, 13, size=(2, D))
        polys.append(num[0] / den[0] + 1j * num[1] / den[1])
        provenance.append(f"random:{r}")
    probes = np.stack([V @ (npoly.polyval(lam, p) * c) for p in polys])
    rank = np.linalg.matrix_rank(probes)
    if rank < D:
        raise InvariantViolation(f"probe states have rank {rank} < {D}")
    return ProbeSet(tuple(polys), tuple(provenance))


@dataclass(frozen=True)
class Fingerprint:
    """Per-(probe, site) entropies of the normalized probe states in one structure."""

    entries: np.ndarray
    skipped: frozenset[int]

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "skipped", frozenset(int(i) for i in self.skipped))


def fingerprint(H: HermitianOp, psi: StateVec, T: Tps, probes: ProbeSet) -> Fingerprint:
    """Entropy table of the probe states R(H)|psi> seen through T.

    Probe states are normalized before the entropy is taken; near-zero
    probes are recorded as skipped rather than amplified.
    """
    if H.dim != T.dims.total:
        raise DimensionMismatch(f"operator dim {H.dim} != product dim {T.dims.total}")
    lam, V = np.linalg.eigh(H.mat)
    c = V.conj().T @ psi.vec
    iso = T.iso.mat
    entries = np.full((len(probes), T.dims.n), np.nan)
    skipped = []
    for r, p in enumerate(probes.polys):
        phi = V @ (npoly.polyval(lam, p) * c)
        nrm = np.linalg.norm(phi)
        if nrm < SKIP_NORM:
            skipped.append(r)
            continue
        entries[r] = site_entropies(iso @ (phi / nrm), T.dims)
    return Fingerprint(entries, frozenset(skipped))


def fingerprints_equal(f1: Fingerprint, f2: Fingerprint, tol: float = 1e-9) -> bool:
    """Entrywise comparison over the shared, unskipped probes."""
    if f1.entries.shape != f2.entries.shape:
        raise IncomparableFingerprints(
            f"entry shapes differ: {f1.entries.shape} vs {f2.entries.shape}"
        )
    if f1.skipped != f2.skipped:
        raise IncomparableFingerprints("skip patterns differ")
    return fingerprint_distance(f1, f2) <= tol


def fingerprint_distance(f1: Fingerprint, f2: Fingerprint) -> float:
    keep = [r for r in range(f1.entries.shape[0]) if r not in f1.skipped]
    if not keep:
        return 0.0
    return float(np.abs(f1.entries[keep] - f2.entries[keep]).max())


class TpsVerdict(enum.Enum):
    SAME = "SameTps"
    DIFFERENT = "DifferentTps"
    INCONSISTENT = "Inconsistent"


def cross_validate_tps(
    H: HermitianOp,
    psi: StateVec,
    T1: Tps,
    T2: Tps,
    probes: ProbeSet,
    tol: float = 1e-7,
) -> TpsVerdict:
    """Cross-check the fingerprint discriminator against direct equivalence.

    With a spanning probe set the two tests must agree; an Inconsistent
    verdict indicts the implementation, not the mathematics.
    """
    fp_same = fingerprints_equal(
        fingerprint(H, psi, T1, probes), fingerprint(H, psi, T2, probes), tol
    )
    tps_same = equivalent(T1, T2)
    if fp_same and tps_same:
        return TpsVerdict.SAME
    if not fp_same and not tps_same:
        return TpsVerdict.DIFFERENT
    return TpsVerdict.INCONSISTENT


def fingerprint_to_json(fp: Fingerprint, probes: ProbeSet) -> dict:
    entries = []
    for r in range(fp.entries.shape[0]):
        if r in fp.skipped:
            continue
        for i in range(fp.entries.shape[1]):
            entries.append([int(r), int(i), float(fp.entries[r, i])])
    return {
        "probes": list(probes.provenance),
        "entries": entries,
        "skipped": sorted(fp.skipped),
    }

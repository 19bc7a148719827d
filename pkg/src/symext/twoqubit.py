"""Closed-form symmetric-extension machinery for two qubits and rank-2 states.

Contents: the constructive pure extension for two-qubit states satisfying the
spectrum condition, the purity/determinant extendibility test (exact on the
proven subclasses, conjectured in general), the rank-2 criterion and its
constructive decomposition, Bell-diagonal inequalities, the Z-correlated
family, and the extremality classification of pure-extendible states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import linalg
from .errors import (
    ConditionUnsatisfied,
    DimensionMismatch,
    NotCanonical,
    OutOfRange,
    PreconditionFailed,
    SpectrumMismatch,
    WrongRank,
)
from .states import (
    BipartiteState,
    TripartiteExtension,
    _equal_margins_purification_vector,
    random_invertible_filter,
    spectrum,
    spectrum_condition,
)

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
SGATE = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
PAULI = (SX, SY, SZ)

# Bell basis order: (|00>+|11>), (|00>-|11>), (|01>+|10>), (|01>-|10>), all /sqrt(2).
BELL = (
    np.array([1, 0, 0, 1], dtype=np.complex128) / np.sqrt(2.0),
    np.array([1, 0, 0, -1], dtype=np.complex128) / np.sqrt(2.0),
    np.array([0, 1, 1, 0], dtype=np.complex128) / np.sqrt(2.0),
    np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2.0),
)

# Local gate pairs sending each unordered pair of Bell states onto the first
# two Bell states (up to phases).  Verified by test_bell_pair_gates.
_SD = SGATE.conj().T
BELL_PAIR_GATES = {
    frozenset({0, 1}): (I2, I2),
    frozenset({0, 2}): (HADAMARD, HADAMARD),
    frozenset({1, 2}): (HADAMARD @ SGATE, HADAMARD @ SGATE),
    frozenset({0, 3}): (HADAMARD @ SGATE, HADAMARD @ _SD),
    frozenset({1, 3}): (HADAMARD @ SGATE @ SGATE, HADAMARD),
    frozenset({2, 3}): (SX, I2),
}


# ---------------------------------------------------------------------------
# constructive pure extension (two qubits)
# ---------------------------------------------------------------------------

def _su2_from_so3(r: np.ndarray) -> np.ndarray:
    """Lift a rotation matrix to SU(2) with u sigma_j u^dag = sum_i r[i,j] sigma_i.

    Quaternion extraction with the usual branch selection for stability near
    rotation angle pi.
    """
    t = float(np.trace(r))
    if t > -0.5:
        w = math.sqrt(max(1.0 + t, 0.0)) / 2.0
        x = (r[2, 1] - r[1, 2]) / (4.0 * w)
        y = (r[0, 2] - r[2, 0]) / (4.0 * w)
        z = (r[1, 0] - r[0, 1]) / (4.0 * w)
    else:
        k = int(np.argmax(np.diag(r)))
        if k == 0:
            x = math.sqrt(max(1.0 + r[0, 0] - r[1, 1] - r[2, 2], 0.0)) / 2.0
            w = (r[2, 1] - r[1, 2]) / (4.0 * x)
            y = (r[0, 1] + r[1, 0]) / (4.0 * x)
            z = (r[0, 2] + r[2, 0]) / (4.0 * x)
        elif k == 1:
            y = math.sqrt(max(1.0 - r[0, 0] + r[1, 1] - r[2, 2], 0.0)) / 2.0
            w = (r[0, 2] - r[2, 0]) / (4.0 * y)
            x = (r[0, 1] + r[1, 0]) / (4.0 * y)
            z = (r[1, 2] + r[2, 1]) / (4.0 * y)
        else:
            z = math.sqrt(max(1.0 - r[0, 0] - r[1, 1] + r[2, 2], 0.0)) / 2.0
            w = (r[1, 0] - r[0, 1]) / (4.0 * z)
            x = (r[0, 2] + r[2, 0]) / (4.0 * z)
            y = (r[1, 2] + r[2, 1]) / (4.0 * z)
    return w * I2 - 1j * (x * SX + y * SY + z * SZ)


def correlation_matrix(rho4: np.ndarray) -> np.ndarray:
    """3x3 real matrix t[i,j] = tr(rho sigma_i (x) sigma_j) of a 2-qubit state."""
    t = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            t[i, j] = float(np.real(np.trace(rho4 @ np.kron(PAULI[i], PAULI[j]))))
    return t


def _bell_diagonalizing_unitaries(rho4: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Local unitaries (u, v) with (u (x) v) rho (u (x) v)^dag Bell-diagonal.

    Valid for states with maximally mixed marginals: the real SVD of the
    correlation matrix is forced into SO(3) (signs absorbed into the singular
    values) and both factors are lifted to SU(2).
    """
    t = correlation_matrix(rho4)
    left, _, right_t = np.linalg.svd(t)
    right = right_t.T
    left = left @ np.diag([1.0, 1.0, np.sign(np.linalg.det(left)) or 1.0])
    right = right @ np.diag([1.0, 1.0, np.sign(np.linalg.det(right)) or 1.0])
    return _su2_from_so3(left.T), _su2_from_so3(right.T)


def _apply_bprime(psi8: np.ndarray, gate: np.ndarray) -> np.ndarray:
    return np.einsum("ij,abj->abi", gate, psi8.reshape(2, 2, 2)).reshape(-1)


def _swap_vec(psi8: np.ndarray) -> np.ndarray:
    return psi8.reshape(2, 2, 2).transpose(0, 2, 1).reshape(-1)


def _extension_from_maximally_mixed(psi: np.ndarray) -> np.ndarray:
    """Symmetrizing B' unitary via Bell diagonalization of tr_A |psi><psi|."""
    rho_bb = linalg.partial_trace(np.outer(psi, psi.conj()), [2, 2, 2], keep=[1, 2])
    u, v = _bell_diagonalizing_unitaries(rho_bb)
    big = np.kron(u, v)
    rho_bell = big @ rho_bb @ linalg.dagger(big)
    weights = np.array([float(np.real(np.vdot(BELL[k], rho_bell @ BELL[k]))) for k in range(4)])
    order = np.argsort(weights, kind="stable")[::-1]
    w1, w2 = BELL_PAIR_GATES[frozenset({int(order[0]), int(order[1])})]
    gate = linalg.dagger(w1 @ u) @ (w2 @ v)
    return _apply_bprime(psi, gate)


def _extension_from_generic(psi: np.ndarray, rho_b: np.ndarray) -> np.ndarray:
    """Symmetrizing B' phase gate in the eigenbasis of a non-degenerate rho_B."""
    eig = linalg.hermitian_eig(rho_b)
    basis = eig.eigenvectors
    coeffs = np.einsum("abj,bB,jJ->aBJ", psi.reshape(2, 2, 2), basis.conj(), basis.conj())
    amp_b, amp_c = coeffs[0, 0, 1], coeffs[0, 1, 0]
    amp_f, amp_g = coeffs[1, 0, 1], coeffs[1, 1, 0]
    # The two candidate phase differences coincide when all four amplitudes
    # are nonzero; prefer the better-conditioned pair.
    if min(abs(amp_b), abs(amp_c)) >= min(abs(amp_f), abs(amp_g)):
        pair = (amp_b, amp_c)
    else:
        pair = (amp_f, amp_g)
    if min(abs(pair[0]), abs(pair[1])) > 1e-10:
        theta = float(np.angle(pair[1]) - np.angle(pair[0]))
    else:
        theta = 0.0
    phase = np.diag([1.0, np.exp(1j * theta)]).astype(np.complex128)
    gate = basis @ phase @ linalg.dagger(basis)
    return _apply_bprime(psi, gate)


def _candidate_residuals(psi: np.ndarray, target: np.ndarray) -> tuple[float, float]:
    sym = float(np.linalg.norm(psi - _swap_vec(psi)))
    red = linalg.trace_distance(
        linalg.partial_trace(np.outer(psi, psi.conj()), [2, 2, 2], keep=[0, 1]), target)
    return sym, red


def construct_pure_extension(rho: BipartiteState) -> TripartiteExtension:
    """Pure symmetric extension of a two-qubit state with matching spectra.

    Starts from the equal-margins purification and makes it swap-symmetric
    with a unitary on B' alone: via Bell diagonalization of the BB' marginal
    when rho_B is (nearly) maximally mixed, via a diagonal phase gate in the
    rho_B eigenbasis otherwise.  Near the crossover both routes are computed
    and the one with smaller residual wins.
    """
    if rho.d_a != 2 or rho.d_b != 2:
        raise DimensionMismatch("pure-extension construction requires two qubits")
    if not spectrum_condition(rho):
        raise SpectrumMismatch("global and local spectra differ; no pure symmetric extension")

    psi = _equal_margins_purification_vector(rho)
    rho_b = rho.rho_b
    gap = linalg.trace_norm(rho_b - I2 / 2.0)

    candidates = []
    if gap < 1e-5:
        candidates.append(_extension_from_maximally_mixed(psi))
    if gap > 1e-9:
        candidates.append(_extension_from_generic(psi, rho_b))
    # symmetrized copies mop up the last residual when a branch lands close
    for vec in list(candidates):
        fixed = vec + _swap_vec(vec)
        norm = np.linalg.norm(fixed)
        if norm > 1e-6:
            candidates.append(fixed / norm)

    target = np.asarray(rho.matrix)
    best = min(candidates, key=lambda v: max(_candidate_residuals(v, target)))
    return TripartiteExtension(np.outer(best, best.conj()), 2, 2, target)


# ---------------------------------------------------------------------------
# purity/determinant condition (conjectured in general, exact on subclasses)
# ---------------------------------------------------------------------------

def conjecture_margin(rho: BipartiteState) -> float:
    """tr(rho_B^2) + 4 sqrt(det rho) - tr(rho^2); nonnegative iff the
    conjectured extendibility condition holds."""
    if rho.d_a != 2 or rho.d_b != 2:
        raise DimensionMismatch("the purity/determinant condition is for two qubits")
    mat = np.asarray(rho.matrix)
    det = max(float(np.real(np.linalg.det(mat))), 0.0)
    purity_b = float(np.real(np.trace(rho.rho_b @ rho.rho_b)))
    purity_ab = float(np.real(np.trace(mat @ mat)))
    return purity_b + 4.0 * math.sqrt(det) - purity_ab


def check_conjecture(rho: BipartiteState) -> bool:
    """Conjectured two-qubit extendibility verdict (proven only on subclasses)."""
    return conjecture_margin(rho) >= -1e-10


# ---------------------------------------------------------------------------
# rank-2 states
# ---------------------------------------------------------------------------

def _rank_le2_necessary_ok(mat: np.ndarray, d_a: int, d_b: int, tol: float = 1e-9) -> bool:
    """Necessary conditions for a rank<=2 state to have a symmetric extension:
    rank(rho_B) <= 2 and lambda_max(rho_AB) <= lambda_max(rho_B)."""
    rho_b = linalg.partial_trace(mat, [d_a, d_b], keep=[1])
    if linalg.numerical_rank(rho_b) > 2:
        return False
    lmax_ab = float(linalg.nonzero_eigenvalues(mat)[0])
    lmax_b = float(linalg.nonzero_eigenvalues(rho_b)[0])
    return lmax_ab <= lmax_b + tol


def rank2_condition(rho: BipartiteState, probe_trials: int = 32, seed: int = 20) -> bool:
    """Extendibility of a rank-2 state via the maximum-eigenvalue comparison.

    For qubit A the verdict is exact: the state has a symmetric extension iff
    rank(rho_B) <= 2 and lambda_max(rho_AB) <= lambda_max(rho_B).  For larger
    A only the "no" direction is conclusive; the necessary condition is then
    also probed under invertible Alice filters and under tracings of tensor
    factors of A (both preserve extendibility), so a True for d_a > 2 means
    "no violation found", not a proof.
    """
    if rho.rank() != 2:
        raise WrongRank(f"rank2_condition needs a rank-2 state, got rank {rho.rank()}")
    mat = np.asarray(rho.matrix)
    if not _rank_le2_necessary_ok(mat, rho.d_a, rho.d_b):
        return False
    if rho.d_a == 2:
        return True

    # factor tracings: if d_a = m*n, tracing either tensor factor of A is a
    # 1-LOCC map; when the output happens to have rank <= 2 the necessary
    # conditions must survive.
    for m in range(2, rho.d_a):
        if rho.d_a % m:
            continue
        n = rho.d_a // m
        full = mat.reshape(m, n, rho.d_b, m, n, rho.d_b)
        for reduced, d_left in ((np.einsum("iljiLJ->ljLJ", full).reshape(n * rho.d_b, n * rho.d_b), n),
                                (np.einsum("iljIlJ->ijIJ", full).reshape(m * rho.d_b, m * rho.d_b), m)):
            if linalg.numerical_rank(reduced) <= 2 and not _rank_le2_necessary_ok(reduced, d_left, rho.d_b):
                return False

    rng = np.random.default_rng(seed)
    for _ in range(probe_trials):
        filt = random_invertible_filter(rho.d_a, rng)
        big = np.kron(filt, np.eye(rho.d_b))
        out = big @ mat @ linalg.dagger(big)
        out /= np.trace(out).real
        if not _rank_le2_necessary_ok(out, rho.d_a, rho.d_b):
            return False
    return True


@dataclass(frozen=True)
class Rank2Decomposition:
    """Convex split of a rank-2 extendible state into two pure-extendible ones."""

    weight: float            # mixture weight of the second component
    p0: float
    p1: float
    component0: BipartiteState
    component1: BipartiteState
    extension0: TripartiteExtension
    extension1: TripartiteExtension

    def mixed_extension(self, target: BipartiteState) -> TripartiteExtension:
        mixed = ((1.0 - self.weight) * np.asarray(self.extension0.matrix)
                 + self.weight * np.asarray(self.extension1.matrix))
        return TripartiteExtension(mixed, 2, 2, target.matrix)


def rank2_decompose(rho: BipartiteState) -> Rank2Decomposition:
    """Split a rank-2 two-qubit state satisfying the rank-2 condition into
    pure-extendible components along its eigenvector pencil.

    Walks the family rho_p = (1-p) |psi0><psi0| + p |psi1><psi1| and bisects
    for the two parameters where global and local maximum eigenvalues agree;
    there the spectrum condition holds and the pure extension is constructed
    directly.
    """
    if rho.d_a != 2 or rho.d_b != 2:
        raise DimensionMismatch("rank2_decompose requires two qubits")
    if rho.rank() != 2:
        raise WrongRank(f"rank2_decompose needs a rank-2 state, got rank {rho.rank()}")
    if not rank2_condition(rho):
        raise ConditionUnsatisfied("lambda_max(rho_AB) exceeds lambda_max(rho_B)")

    eig = linalg.hermitian_eig(rho.matrix)
    psi0 = eig.eigenvectors[:, 0]
    psi1 = eig.eigenvectors[:, 1]
    lam = float(eig.eigenvalues[1])
    proj0 = np.outer(psi0, psi0.conj())
    proj1 = np.outer(psi1, psi1.conj())
    marg0 = linalg.partial_trace(proj0, [2, 2], keep=[1])
    marg1 = linalg.partial_trace(proj1, [2, 2], keep=[1])

    def gap(p: float) -> float:
        lmax_b = float(np.linalg.eigvalsh((1.0 - p) * marg0 + p * marg1)[-1])
        return lmax_b - max(p, 1.0 - p)

    def bisect(lo: float, hi: float, increasing: bool) -> float:
        # gap(lo) and gap(hi) bracket zero by construction
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            g = gap(mid)
            if (g < 0.0) == increasing:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    if gap(lam) <= 1e-13:
        p0 = p1 = lam
        weight = 0.0
    else:
        p0 = bisect(0.0, lam, increasing=True) if gap(0.0) < 0.0 else 0.0
        p1 = bisect(lam, 1.0, increasing=False) if gap(1.0) < 0.0 else 1.0
        weight = 0.0 if p1 == p0 else (lam - p0) / (p1 - p0)

    def pencil_state(p: float) -> BipartiteState:
        return BipartiteState((1.0 - p) * proj0 + p * proj1, 2, 2)

    comp0 = pencil_state(p0)
    comp1 = pencil_state(p1) if p1 != p0 else comp0
    ext0 = construct_pure_extension(comp0)
    ext1 = construct_pure_extension(comp1) if p1 != p0 else ext0
    return Rank2Decomposition(weight=float(weight), p0=float(p0), p1=float(p1),
                              component0=comp0, component1=comp1,
                              extension0=ext0, extension1=ext1)


# ---------------------------------------------------------------------------
# Bell-diagonal states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BellDiagonalParams:
    """Eigenvalues of a Bell-diagonal state, in the order of the BELL basis."""

    p_i: float
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self):
        probs = self.as_array()
        if probs.min() < -1e-12:
            raise OutOfRange(f"negative Bell weight {probs.min():.3e}")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise OutOfRange(f"Bell weights sum to {probs.sum()}, not 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_i, self.p_x, self.p_y, self.p_z])

    def state(self) -> BipartiteState:
        # p_x weights |01>+|10>, p_y weights |01>-|10>, p_z weights |00>-|11>
        mat = (self.p_i * np.outer(BELL[0], BELL[0].conj())
               + self.p_x * np.outer(BELL[2], BELL[2].conj())
               + self.p_y * np.outer(BELL[3], BELL[3].conj())
               + self.p_z * np.outer(BELL[1], BELL[1].conj()))
        return BipartiteState(mat, 2, 2)


def bell_alphas(params: BellDiagonalParams) -> tuple[float, float, float]:
    """Coordinates (a1, a2, a3) of the extendibility inequalities."""
    p_i, p_x, p_y, p_z = params.p_i, params.p_x, params.p_y, params.p_z
    a1 = p_i - p_x - p_y + p_z
    a2 = math.sqrt(2.0) * (p_i - p_z)
    a3 = math.sqrt(2.0) * (p_x - p_y)
    return a1, a2, a3


def _bell_margins_from_alphas(a1, a2, a3):
    quartic = 4.0 * a1 * (a2 ** 2 - a3 ** 2) - (a2 ** 2 - a3 ** 2) ** 2 \
        - 4.0 * a1 ** 2 * (a2 ** 2 + a3 ** 2)
    lin2 = a2 ** 2 - a3 ** 2 - 2.0 * math.sqrt(2.0) * a1 * abs(a2)
    lin3 = a3 ** 2 - a2 ** 2 + 2.0 * math.sqrt(2.0) * a1 * abs(a3)
    return quartic, lin2, lin3


def bell_margins(params: BellDiagonalParams) -> tuple[float, float, float]:
    """Slack of the three closed-form inequalities (any one >= 0 suffices)."""
    return _bell_margins_from_alphas(*bell_alphas(params))


def bell_extendible(params: BellDiagonalParams) -> bool:
    """Exact extendibility of a Bell-diagonal state."""
    return max(bell_margins(params)) >= -1e-10


def bell_conjecture_margin(params: BellDiagonalParams) -> float:
    """Slack of 4 sqrt(det rho) >= tr(rho^2) - 1/2 for Bell-diagonal states."""
    p = params.as_array()
    det = max(float(np.prod(p)), 0.0)
    return 4.0 * math.sqrt(det) - (float(np.sum(p ** 2)) - 0.5)


def bell_conjecture_form(params: BellDiagonalParams) -> bool:
    return bell_conjecture_margin(params) >= -1e-10


def bell_diagonal_from_state(state: BipartiteState, tol: float = 1e-10) -> BellDiagonalParams | None:
    """Bell weights if the state is diagonal in the Bell basis, else None."""
    if state.d_a != 2 or state.d_b != 2:
        return None
    basis = np.stack([BELL[0], BELL[2], BELL[3], BELL[1]], axis=1)
    in_bell = linalg.dagger(basis) @ state.matrix @ basis
    if np.max(np.abs(in_bell - np.diag(np.diag(in_bell)))) > tol:
        return None
    d = np.real(np.diag(in_bell))
    return BellDiagonalParams(p_i=float(d[0]), p_x=float(d[1]), p_y=float(d[2]), p_z=float(d[3]))


def _bell_margins_vectorized(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(max closed-form margin, determinant-form margin) per probability row."""
    a1 = probs[:, 0] - probs[:, 1] - probs[:, 2] + probs[:, 3]
    a2 = math.sqrt(2.0) * (probs[:, 0] - probs[:, 3])
    a3 = math.sqrt(2.0) * (probs[:, 1] - probs[:, 2])
    d = a2 ** 2 - a3 ** 2
    quartic = 4.0 * a1 * d - d ** 2 - 4.0 * a1 ** 2 * (a2 ** 2 + a3 ** 2)
    lin2 = d - 2.0 * math.sqrt(2.0) * a1 * np.abs(a2)
    lin3 = -d + 2.0 * math.sqrt(2.0) * a1 * np.abs(a3)
    closed = np.maximum(quartic, np.maximum(lin2, lin3))
    det = np.clip(np.prod(probs, axis=1), 0.0, None)
    conj = 4.0 * np.sqrt(det) - (np.sum(probs ** 2, axis=1) - 0.5)
    return closed, conj


@dataclass(frozen=True)
class BellEquivalenceReport:
    samples: int
    disagreements: int
    boundary_skipped: int
    seed: int


def bell_equivalence_check(n: int, seed: int = 1, band: float = 1e-9) -> BellEquivalenceReport:
    """Sample Bell probability vectors and compare the two verdict forms.

    Points where either margin lies within ``band`` of zero are skipped as
    boundary; everywhere else the verdicts must agree, and the report counts
    how often they do not (expected: zero).
    """
    rng = np.random.default_rng(seed)
    probs = rng.dirichlet([1.0, 1.0, 1.0, 1.0], size=n)
    closed, conj = _bell_margins_vectorized(probs)
    boundary = (np.abs(closed) <= band) | (np.abs(conj) <= band)
    disagree = ((closed >= 0) != (conj >= 0)) & ~boundary
    return BellEquivalenceReport(samples=n, disagreements=int(disagree.sum()),
                                 boundary_skipped=int(boundary.sum()), seed=seed)


# ---------------------------------------------------------------------------
# Z-correlated states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZCorrParams:
    """Diagonal (p1..p4) plus antidiagonal couplings x (outer) and y (inner).

    Canonical ordering requires p1 to be the largest diagonal entry; x and y
    are nonnegative and bounded by positivity of the two 2x2 blocks.
    """

    p1: float
    p2: float
    p3: float
    p4: float
    x: float
    y: float

    def __post_init__(self):
        probs = np.array([self.p1, self.p2, self.p3, self.p4])
        if probs.min() < -1e-12:
            raise OutOfRange(f"negative diagonal entry {probs.min():.3e}")
        if abs(probs.sum() - 1.0) > 1e-9:
            raise OutOfRange(f"diagonal sums to {probs.sum()}, not 1")
        if self.p1 < max(self.p2, self.p3, self.p4) - 1e-12:
            raise NotCanonical("p1 must be the largest diagonal entry")
        if self.x < -1e-12 or self.y < -1e-12:
            raise NotCanonical("couplings must be nonnegative")
        if self.x > math.sqrt(max(self.p1 * self.p4, 0.0)) + 1e-12:
            raise OutOfRange("x exceeds sqrt(p1 p4); matrix not PSD")
        if self.y > math.sqrt(max(self.p2 * self.p3, 0.0)) + 1e-12:
            raise OutOfRange("y exceeds sqrt(p2 p3); matrix not PSD")

    def matrix(self) -> np.ndarray:
        m = np.diag([self.p1, self.p2, self.p3, self.p4]).astype(np.complex128)
        m[0, 3] = m[3, 0] = self.x
        m[1, 2] = m[2, 1] = self.y
        return m

    def state(self) -> BipartiteState:
        return BipartiteState(self.matrix(), 2, 2)


def _zcorr_f(s, t, p1, p4):
    return np.sqrt(np.clip(s, 0.0, None)) * np.sqrt(np.clip(p1 - t, 0.0, None)) \
        + np.sqrt(np.clip(t, 0.0, None)) * np.sqrt(np.clip(p4 - s, 0.0, None))


def _zcorr_h(s, t, p2, p3):
    return np.sqrt(np.clip(s, 0.0, None)) * np.sqrt(np.clip(p2 - t, 0.0, None)) \
        + np.sqrt(np.clip(t, 0.0, None)) * np.sqrt(np.clip(p3 - s, 0.0, None))


def zcorr_bound_y0(p1: float, p2: float, p3: float, p4: float) -> float:
    """Largest x compatible with a symmetric extension when y = 0.

    Two-branch closed form; when p3 >= p4 every admissible x works, so the
    bound saturates at the positivity limit sqrt(p1 p4).
    """
    if p1 < max(p2, p3, p4) - 1e-12:
        raise NotCanonical("p1 must be the largest diagonal entry")
    if p3 >= p4 or p1 * p3 + p2 * p4 >= p1 * p4:
        return math.sqrt(max(p1 * p4, 0.0))
    return math.sqrt(max(p3 * (p1 - p2), 0.0)) + math.sqrt(max(p2 * (p4 - p3), 0.0))


def _zcorr_grid_search(z: ZCorrParams, grid: int = 200, refinements: int = 3):
    """Best (s, t) for the two coupling inequalities, by grid + local refinement.

    Returns (margin, s, t) maximizing min(f - x, h - y) over the admissible
    rectangle s in [0, min(p3, p4)], t in [0, p2].
    """
    s_hi = min(z.p3, z.p4)
    t_hi = z.p2
    s_lo, t_lo = 0.0, 0.0
    s_span, t_span = s_hi - s_lo, t_hi - t_lo
    best = (-np.inf, 0.0, 0.0)
    for level in range(refinements + 1):
        s_vals = np.linspace(s_lo, s_hi, grid)
        t_vals = np.linspace(t_lo, t_hi, grid)
        ss, tt = np.meshgrid(s_vals, t_vals, indexing="ij")
        margin = np.minimum(_zcorr_f(ss, tt, z.p1, z.p4) - z.x,
                            _zcorr_h(ss, tt, z.p2, z.p3) - z.y)
        k = int(np.argmax(margin))
        i, j = divmod(k, grid)
        if margin[i, j] > best[0]:
            best = (float(margin[i, j]), float(ss[i, j]), float(tt[i, j]))
        # shrink a 10x smaller window around the incumbent
        s_span /= 10.0
        t_span /= 10.0
        s_lo = min(max(best[1] - s_span / 2.0, 0.0), min(z.p3, z.p4))
        s_hi = min(best[1] + s_span / 2.0, min(z.p3, z.p4))
        t_lo = min(max(best[2] - t_span / 2.0, 0.0), z.p2)
        t_hi = min(best[2] + t_span / 2.0, z.p2)
    return best


def zcorr_feasible_point(z: ZCorrParams) -> tuple[float, float] | None:
    """An (s, t) witness satisfying both coupling inequalities, or None."""
    if z.x <= 1e-12 and z.y <= 1e-12:
        return (0.0, 0.0)
    if z.y <= 1e-12:
        if z.x > zcorr_bound_y0(z.p1, z.p2, z.p3, z.p4) + 1e-9:
            return None
        if z.p3 >= z.p4:
            s, t = z.p4, 0.0
        elif z.p1 * z.p3 + z.p2 * z.p4 >= z.p1 * z.p4:
            s = z.p3
            t = 0.0 if z.p4 <= 1e-15 else z.p1 * (z.p4 - z.p3) / z.p4
        else:
            s, t = z.p3, z.p2
        return (float(s), float(min(t, z.p2)))
    margin, s, t = _zcorr_grid_search(z)
    return (s, t) if margin >= -1e-9 else None


def zcorr_extendible(z: ZCorrParams) -> bool:
    """Extendibility of a Z-correlated state.

    Exact closed form when y = 0 or when p3 >= p4 (always extendible there);
    otherwise a refined grid search over the coupling inequalities.
    """
    if z.x <= 1e-12 and z.y <= 1e-12:
        return True
    if z.y <= 1e-12:
        return z.x <= zcorr_bound_y0(z.p1, z.p2, z.p3, z.p4) + 1e-9
    if z.p3 >= z.p4 - 1e-15:
        return True
    margin, _, _ = _zcorr_grid_search(z)
    return margin >= -1e-9


def _phase_gates(u: complex, v: complex) -> np.ndarray:
    """diag(1,u) on A and diag(1,v) on both B and B' of an extension."""
    d_a = np.diag([1.0, u]).astype(np.complex128)
    d_b = np.diag([1.0, v]).astype(np.complex128)
    return np.kron(d_a, np.kron(d_b, d_b))


def zcorr_build_extension(z: ZCorrParams, s: float, t: float) -> TripartiteExtension:
    """Explicit rank-2 symmetric extension of a Z-correlated state.

    For the given (s, t) the construction reaches couplings exactly at the
    two inequality bounds; smaller target couplings are obtained by mixing
    with phase-flipped copies, which leaves the diagonal untouched.
    """
    if not (-1e-12 <= s <= min(z.p3, z.p4) + 1e-12):
        raise OutOfRange(f"s={s} outside [0, min(p3, p4)]")
    if not (-1e-12 <= t <= z.p2 + 1e-12):
        raise OutOfRange(f"t={t} outside [0, p2]")
    s = min(max(s, 0.0), min(z.p3, z.p4))
    t = min(max(t, 0.0), z.p2)
    x_sat = float(_zcorr_f(s, t, z.p1, z.p4))
    y_sat = float(_zcorr_h(s, t, z.p2, z.p3))
    if z.x > x_sat + 1e-9 or z.y > y_sat + 1e-9:
        raise OutOfRange("couplings exceed what this (s, t) supports")

    def ket3(i, j, k):
        v = np.zeros(8, dtype=np.complex128)
        v[(i * 2 + j) * 2 + k] = 1.0
        return v

    vec1 = (math.sqrt(max(z.p1 - t, 0.0)) * ket3(0, 0, 0)
            + math.sqrt(max(z.p2 - t, 0.0)) * ket3(0, 1, 1)
            + math.sqrt(max(s, 0.0)) * (ket3(1, 0, 1) + ket3(1, 1, 0)))
    vec2 = (math.sqrt(max(t, 0.0)) * (ket3(0, 0, 1) + ket3(0, 1, 0))
            + math.sqrt(max(z.p3 - s, 0.0)) * ket3(1, 0, 0)
            + math.sqrt(max(z.p4 - s, 0.0)) * ket3(1, 1, 1))
    saturated = np.outer(vec1, vec1.conj()) + np.outer(vec2, vec2.conj())

    frac_x = 1.0 if x_sat <= 1e-15 else min(z.x / x_sat, 1.0)
    frac_y = 1.0 if y_sat <= 1e-15 else min(z.y / y_sat, 1.0)
    flip_x = _phase_gates(1j, 1j)        # x -> -x, y unchanged
    flip_y = _phase_gates(1j, -1j)       # y -> -y, x unchanged
    flip_xy = _phase_gates(-1.0, 1.0)    # both flip
    out = np.zeros_like(saturated)
    for gate, wx, wy in ((None, 1.0 + frac_x, 1.0 + frac_y),
                         (flip_x, 1.0 - frac_x, 1.0 + frac_y),
                         (flip_y, 1.0 + frac_x, 1.0 - frac_y),
                         (flip_xy, 1.0 - frac_x, 1.0 - frac_y)):
        w = wx * wy / 4.0
        if w <= 0.0:
            continue
        term = saturated if gate is None else gate @ saturated @ linalg.dagger(gate)
        out += w * term
    return TripartiteExtension(out, 2, 2, z.matrix())


# ---------------------------------------------------------------------------
# extremality of pure-extendible states
# ---------------------------------------------------------------------------

class PureExtendibleTag(Enum):
    EXTREMAL = "extremal"
    SEPARABLE_NON_EXTREMAL = "separable-non-extremal"


@dataclass(frozen=True)
class SeparableWitness:
    """Two-product-term form lam |a0 b0><a0 b0| + (1-lam) |a1 b1><a1 b1|
    with <b0|b1> = 0."""

    weight: float
    a0: np.ndarray
    a1: np.ndarray
    b0: np.ndarray
    b1: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v0 = np.kron(self.a0, self.b0)
        v1 = np.kron(self.a1, self.b1)
        return self.weight * np.outer(v0, v0.conj()) + (1.0 - self.weight) * np.outer(v1, v1.conj())


@dataclass(frozen=True)
class PureExtendibleClass:
    tag: PureExtendibleTag
    witness: SeparableWitness | None


def _factor_product_vector(vec4: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Split a product vector into its unit tensor factors (None if entangled)."""
    m = vec4.reshape(2, 2)
    u, s, vh = np.linalg.svd(m)
    if s[1] > 1e-7 * max(s[0], 1e-300):
        return None
    return u[:, 0], vh[0, :].conj()


def classify_pure_extendible(rho: BipartiteState) -> PureExtendibleClass:
    """Is a mixed pure-extendible two-qubit state extremal in the extendible set?

    Non-extremal ones are exactly the separable ones (PPT for two qubits),
    and those have a two-term product decomposition with orthogonal B parts,
    recovered here from the eigenvectors.
    """
    if rho.d_a != 2 or rho.d_b != 2:
        raise DimensionMismatch("classification is for two qubits")
    if not spectrum_condition(rho):
        raise PreconditionFailed("state is not pure-extendible (spectrum condition fails)")
    if rho.purity() >= 1.0 - 1e-9:
        raise PreconditionFailed("state is pure; extremality classification needs a mixed state")

    pt = linalg.partial_transpose(rho.matrix, [2, 2], "B")
    if float(np.linalg.eigvalsh((pt + linalg.dagger(pt)) / 2.0).min()) < -1e-9:
        return PureExtendibleClass(PureExtendibleTag.EXTREMAL, None)

    eig = linalg.hermitian_eig(rho.matrix)
    lam0, lam1 = float(eig.eigenvalues[0]), float(eig.eigenvalues[1])
    if lam0 - lam1 > 1e-9:
        pieces = []
        for idx, weight in ((0, lam0), (1, lam1)):
            fac = _factor_product_vector(eig.eigenvectors[:, idx])
            if fac is None:
                raise PreconditionFailed("separable pure-extendible state with non-product eigenvector")
            a, b = fac
            pieces.append((weight, a / np.linalg.norm(a), b / np.linalg.norm(b)))
        (w0, a0, b0), (_, a1, b1) = pieces
        return PureExtendibleClass(
            PureExtendibleTag.SEPARABLE_NON_EXTREMAL,
            SeparableWitness(weight=w0, a0=a0, a1=a1, b0=b0, b1=b1))

    # degenerate weights: find the product directions inside the eigenspace
    v = eig.eigenvectors[:, 0].reshape(2, 2)
    w = eig.eigenvectors[:, 1].reshape(2, 2)
    c2 = np.linalg.det(v)
    c0 = np.linalg.det(w)
    c1 = np.linalg.det(v + w) - c2 - c0
    coeffs = np.array([c2, c1, c0])
    if np.max(np.abs(coeffs)) < 1e-12:
        # every vector in the span is product: rho = |a><a| (x) rho_B
        a_side = np.linalg.svd(v)[0][:, 0]
        rb = linalg.hermitian_eig(rho.rho_b)
        return PureExtendibleClass(
            PureExtendibleTag.SEPARABLE_NON_EXTREMAL,
            SeparableWitness(weight=float(rb.eigenvalues[0]), a0=a_side, a1=a_side,
                             b0=rb.eigenvectors[:, 0], b1=rb.eigenvectors[:, 1]))
    roots = np.roots(coeffs)  # ratios alpha/beta with det(alpha V + beta W) = 0
    vectors = []
    for r in roots:
        cand = r * eig.eigenvectors[:, 0] + eig.eigenvectors[:, 1]
        nrm = np.linalg.norm(cand)
        if nrm > 1e-12:
            vectors.append(cand / nrm)
    if len(roots) < 2:
        # degree dropped: beta = 0 (pure V direction) is the missing root
        vectors.append(eig.eigenvectors[:, 0])
    factored = [_factor_product_vector(vec) for vec in vectors]
    if len(factored) < 2 or any(f is None for f in factored):
        raise PreconditionFailed("could not factor the degenerate eigenspace into products")
    (a0, b0), (a1, b1) = factored[0], factored[1]
    return PureExtendibleClass(
        PureExtendibleTag.SEPARABLE_NON_EXTREMAL,
        SeparableWitness(weight=0.5,
                         a0=a0 / np.linalg.norm(a0), a1=a1 / np.linalg.norm(a1),
                         b0=b0 / np.linalg.norm(b0), b1=b1 / np.linalg.norm(b1)))

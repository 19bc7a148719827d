"""Quantum channels: Choi states, complementary channels, degradability.

A channel is anti-degradable exactly when its Choi state admits a symmetric
extension of the output system, and degradable exactly when the Choi state of
its complementary channel does.  This module carries channels as Kraus
families, moves between Kraus and Choi pictures, builds minimal-environment
complementary channels, and classifies degradability with closed-form
shortcuts where the rank-2 results apply.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import linalg, twoqubit
from .errors import InvalidChannel, NotAChoiState, NotAnExtension, WrongRank
from .oracle import Feasibility, FeasibilityResult, OracleOptions, find_symmetric_extension
from .states import BipartiteState, TripartiteExtension, is_symmetric_extension

KRAUS_RANK_CUTOFF = 1e-9


@dataclass(frozen=True)
class Channel:
    """Completely positive trace-preserving map as a Kraus family."""

    kraus: tuple[np.ndarray, ...]
    d_in: int
    d_out: int

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=np.complex128) for k in self.kraus)
        if not ops:
            raise InvalidChannel("empty Kraus family")
        if any(k.shape != (self.d_out, self.d_in) for k in ops):
            raise InvalidChannel(
                f"Kraus operators must be {self.d_out}x{self.d_in}, got {[k.shape for k in ops]}")
        total = sum(linalg.dagger(k) @ k for k in ops)
        if np.max(np.abs(total - np.eye(self.d_in))) > 1e-9:
            raise InvalidChannel("Kraus family is not trace preserving")
        object.__setattr__(self, "kraus", ops)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=np.complex128)
        return sum(k @ rho @ linalg.dagger(k) for k in self.kraus)

    def environment_dim(self) -> int:
        """Rank of the Kraus Gram matrix: the minimal Stinespring environment."""
        gram = np.array([[np.trace(linalg.dagger(a) @ b) for b in self.kraus] for a in self.kraus])
        vals = np.linalg.eigvalsh((gram + linalg.dagger(gram)) / 2.0)
        top = float(vals.max(initial=0.0))
        if top <= 0.0:
            return 0
        return int(np.sum(vals > KRAUS_RANK_CUTOFF * top))


@dataclass(frozen=True)
class ChoiState:
    """Choi representation: maximally entangled input, channel on the second half."""

    state: BipartiteState

    def __post_init__(self):
        marginal = self.state.rho_a
        if np.max(np.abs(marginal - np.eye(self.state.d_a) / self.state.d_a)) > 1e-9:
            raise NotAChoiState("input marginal of a Choi state must be maximally mixed")

    @property
    def d_in(self) -> int:
        return self.state.d_a

    @property
    def d_out(self) -> int:
        return self.state.d_b


def choi_state(channel: Channel) -> ChoiState:
    """(1/d) sum_ij |i><j| (x) N(|i><j|), computed Kraus by Kraus."""
    d = channel.d_in
    mat = np.zeros((d * channel.d_out, d * channel.d_out), dtype=np.complex128)
    for k in channel.kraus:
        vec = k.T.reshape(-1)  # component (i, b) = K[b, i]
        mat += np.outer(vec, vec.conj())
    return ChoiState(BipartiteState(mat / d, d, channel.d_out))


def kraus_from_choi(choi: ChoiState) -> Channel:
    """Minimal Kraus family recovering the channel from its Choi state."""
    eig = linalg.hermitian_eig(choi.state.matrix)
    top = float(eig.eigenvalues.max(initial=0.0))
    kraus = []
    for val, vec in zip(eig.eigenvalues, eig.eigenvectors.T):
        if val <= KRAUS_RANK_CUTOFF * top:
            continue
        kraus.append(np.sqrt(val * choi.d_in) * vec.reshape(choi.d_in, choi.d_out).T)
    return Channel(tuple(kraus), d_in=choi.d_in, d_out=choi.d_out)


def minimal_kraus(channel: Channel) -> Channel:
    """Linearly independent Kraus family for the same map."""
    return kraus_from_choi(choi_state(channel))


def complementary_channel(channel: Channel) -> Channel:
    """Channel to the environment of a minimal Stinespring dilation.

    With minimal Kraus operators K_m, the complementary Kraus family is the
    re-slicing L_b[m, i] = K_m[b, i]; the result is unique up to a unitary on
    the environment output.
    """
    minimal = minimal_kraus(channel)
    stack = np.stack(minimal.kraus)  # (env, d_out, d_in)
    kraus = tuple(np.ascontiguousarray(stack[:, b, :]) for b in range(channel.d_out))
    return Channel(kraus, d_in=channel.d_in, d_out=len(minimal.kraus))


def _shortcut_two_qubit(choi: ChoiState) -> FeasibilityResult | None:
    """Exact fast paths for 2x2 Choi states (rank-2 criterion, Bell diagonal)."""
    state = choi.state
    if state.d_a != 2 or state.d_b != 2:
        return None
    if state.rank() <= 2:
        if state.rank() == 1:
            # pure Choi = unitary channel: extendible iff product, which for a
            # maximally mixed marginal never happens
            return FeasibilityResult(Feasibility.INFEASIBLE, None, 0.5, 0, method="rank2")
        if not twoqubit.rank2_condition(state):
            gap = float(linalg.nonzero_eigenvalues(state.matrix)[0]
                        - linalg.nonzero_eigenvalues(state.rho_b)[0])
            return FeasibilityResult(Feasibility.INFEASIBLE, None, max(gap, 0.0), 0,
                                     method="rank2")
        decomp = twoqubit.rank2_decompose(state)
        witness = decomp.mixed_extension(state)
        if is_symmetric_extension(witness, state, tol=1e-7):
            return FeasibilityResult(
                Feasibility.FEASIBLE, witness,
                residual=max(witness.symmetry_residual, witness.reduction_residual),
                iterations=0, method="rank2")
        return None
    bell = twoqubit.bell_diagonal_from_state(state)
    if bell is not None and not twoqubit.bell_extendible(bell):
        margin = max(twoqubit.bell_margins(bell))
        return FeasibilityResult(Feasibility.INFEASIBLE, None, abs(margin), 0, method="bell-diagonal")
    return None


def is_anti_degradable(channel: Channel, opts: OracleOptions | None = None) -> FeasibilityResult:
    """Symmetric extendibility of the Choi state, with proven 2-qubit shortcuts."""
    choi = choi_state(channel)
    shortcut = _shortcut_two_qubit(choi)
    if shortcut is not None:
        return shortcut
    return find_symmetric_extension(choi.state, opts)


def is_degradable(channel: Channel, opts: OracleOptions | None = None) -> FeasibilityResult:
    """Anti-degradability of the complementary channel.

    Qubit-output fast path: a degradable channel with a qubit output cannot
    have an environment larger than a qubit, so environment rank >= 3 settles
    the question without any iteration.
    """
    if channel.d_out == 2 and channel.environment_dim() > 2:
        return FeasibilityResult(Feasibility.INFEASIBLE, None, float("inf"), 0,
                                 method="qubit-output-environment-bound")
    return is_anti_degradable(complementary_channel(channel), opts)


def rank2_marginal_rank_bound(rho: BipartiteState) -> bool:
    """Necessary filter: a rank-2 state with a symmetric extension must have
    rank(rho_B) <= 2."""
    if rho.rank() != 2:
        raise WrongRank(f"rank-2 filter applied to a rank-{rho.rank()} state")
    return linalg.numerical_rank(rho.rho_b) <= 2


class ChannelTag(Enum):
    DEGRADABLE = "degradable"
    ANTI_DEGRADABLE = "anti-degradable"
    BOTH = "both"
    NEITHER = "neither"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class ChannelClass:
    tag: ChannelTag
    degradable: FeasibilityResult
    anti_degradable: FeasibilityResult


def classify_channel(channel: Channel, opts: OracleOptions | None = None) -> ChannelClass:
    """Joint degradable / anti-degradable verdict.

    Undecided evidence keeps the tag Undecided unless the channel belongs to
    the class where "neither" is impossible (qubit channels with at most a
    qubit environment), in which case one conclusive Infeasible pins the tag.
    """
    deg = is_degradable(channel, opts)
    anti = is_anti_degradable(channel, opts)
    table = {
        (Feasibility.FEASIBLE, Feasibility.FEASIBLE): ChannelTag.BOTH,
        (Feasibility.FEASIBLE, Feasibility.INFEASIBLE): ChannelTag.DEGRADABLE,
        (Feasibility.INFEASIBLE, Feasibility.FEASIBLE): ChannelTag.ANTI_DEGRADABLE,
        (Feasibility.INFEASIBLE, Feasibility.INFEASIBLE): ChannelTag.NEITHER,
    }
    tag = table.get((deg.status, anti.status), ChannelTag.UNDECIDED)
    if tag is ChannelTag.UNDECIDED:
        never_neither = (channel.d_in == 2 and channel.d_out == 2
                         and channel.environment_dim() <= 2)
        if never_neither:
            if deg.status is Feasibility.INFEASIBLE and anti.status is Feasibility.UNDECIDED:
                tag = ChannelTag.ANTI_DEGRADABLE
            elif anti.status is Feasibility.INFEASIBLE and deg.status is Feasibility.UNDECIDED:
                tag = ChannelTag.DEGRADABLE
    return ChannelClass(tag=tag, degradable=deg, anti_degradable=anti)


def degrading_map_from_extension(channel: Channel, sigma: TripartiteExtension) -> Channel:
    """Anti-degrading map from a symmetric extension of the Choi state.

    Purifying the extension makes B' (x) R an environment for the channel, so
    tracing R degrades that environment back to the output.  The returned map
    acts on the minimal environment of ``complementary_channel(channel)``; it
    is found by aligning the two Stinespring isometries.
    """
    choi = choi_state(channel)
    if not is_symmetric_extension(sigma, choi.state, tol=1e-7):
        raise NotAnExtension("sigma does not verify as an extension of the Choi state")
    d_in, d_out = channel.d_in, channel.d_out

    eig = linalg.hermitian_eig(sigma.matrix)
    top = float(eig.eigenvalues.max(initial=0.0))
    keep = [i for i, v in enumerate(eig.eigenvalues) if v > linalg.ZERO_CUTOFF * top]
    r_dim = len(keep)
    # purification |psi> on A (x) B (x) B' (x) R
    psi = np.zeros(sigma.dim * r_dim, dtype=np.complex128)
    for slot, idx in enumerate(keep):
        contrib = np.sqrt(eig.eigenvalues[idx]) * eig.eigenvectors[:, idx]
        psi += np.kron(contrib, np.eye(r_dim, dtype=np.complex128)[slot])

    # psi as a Stinespring isometry of the channel: W[(b, b', r), i] = sqrt(d) psi[(i, b, b', r)]
    env_dim = d_out * r_dim
    big = psi.reshape(d_in, d_out, d_out * r_dim)
    w_psi = np.sqrt(d_in) * big.transpose(1, 2, 0).reshape(d_out * env_dim, d_in)

    minimal = minimal_kraus(channel)
    e_min = len(minimal.kraus)
    w_min = np.zeros((d_out * e_min, d_in), dtype=np.complex128)
    for m, k in enumerate(minimal.kraus):
        w_min.reshape(d_out, e_min, d_in)[:, m, :] = k

    # isometry V with (I (x) V) w_min = w_psi, solved in least squares and checked
    lhs = w_min.reshape(d_out, e_min, d_in).transpose(0, 2, 1).reshape(d_out * d_in, e_min)
    rhs = w_psi.reshape(d_out, env_dim, d_in).transpose(0, 2, 1).reshape(d_out * d_in, env_dim)
    v_t, residuals, _, _ = np.linalg.lstsq(lhs, rhs, rcond=None)
    v = v_t.T  # env_dim x e_min
    if np.max(np.abs(lhs @ v_t - rhs)) > 1e-6:
        raise NotAnExtension("extension is inconsistent with the channel's dilation")

    # degrading map = embed environment into B' (x) R via V, then trace R
    kraus = tuple((np.eye(d_out * r_dim, dtype=np.complex128)
                   .reshape(d_out, r_dim, d_out * r_dim)[:, r, :] @ v)
                  for r in range(r_dim))
    return Channel(kraus, d_in=e_min, d_out=d_out)

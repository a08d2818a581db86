"""Truncated two-mode Fock-space oracle for the interferometer weak values.

States are built directly in the output-port basis (bright ``B``, dark ``D``)
and the arm operators are obtained from the final beamsplitter relation

    a2 = t a_B - r a_D
    a1 = r a_B + t a_D

so no beamsplitter unitary is ever simulated.  Nothing here is expanded in
``delta``: the only approximation is the Fock cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import CutoffTooSmall, DegeneratePostSelection, DomainError
from .quantum import SQRT2, BSMode, bs_coefficients

LEAKAGE_TOL = 1e-8
DENOM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TwoModeState:
    """Amplitudes ``amps[n0, n1]`` over two modes, each truncated at ``cutoff`` photons.

    ``modes`` names the two modes; the default is the output-port basis.
    The state may be unnormalized; ``norm`` reports ``sum |amps|^2``.
    """

    cutoff: int
    amps: np.ndarray
    modes: tuple[str, str] = ("B", "D")

    def __post_init__(self):
        d = self.cutoff + 1
        if self.amps.shape != (d, d):
            raise ValueError(f"amplitude tensor must have shape {(d, d)}, got {self.amps.shape}")
        self.amps.setflags(write=False)
        if self.norm > 1.0 + 1e-9:
            raise DomainError(f"state norm {self.norm} exceeds 1")

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    @property
    def leakage(self) -> float:
        return 1.0 - self.norm

    @property
    def vector(self) -> np.ndarray:
        return self.amps.reshape(-1)


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Dense operator on the truncated two-mode space, tagged with what it represents."""

    matrix: np.ndarray
    tag: str

    def __matmul__(self, other):
        if isinstance(other, ModeOperator):
            return ModeOperator(self.matrix @ other.matrix, f"{self.tag}*{other.tag}")
        if isinstance(other, TwoModeState):
            return self.matrix @ other.vector
        return self.matrix @ other

    @property
    def dag(self) -> "ModeOperator":
        return ModeOperator(self.matrix.conj().T, self.tag + "^dag")

    def expect(self, bra: TwoModeState, ket: TwoModeState | None = None) -> complex:
        """``<bra| op |ket>`` (``ket`` defaults to ``bra``)."""
        ket = bra if ket is None else ket
        return complex(np.vdot(bra.vector, self.matrix @ ket.vector))


def annihilation(cutoff: int) -> np.ndarray:
    """Single-mode lowering matrix with ``a[n-1, n] = sqrt(n)``."""
    if cutoff < 1:
        raise DomainError(f"cutoff must be >= 1, got {cutoff}")
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)


@lru_cache(maxsize=8)
def _mode_lowering(cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    a = annihilation(cutoff)
    eye = np.eye(cutoff + 1)
    first, second = np.kron(a, eye), np.kron(eye, a)
    first.setflags(write=False)
    second.setflags(write=False)
    return first, second


def mode_operators(t: float, r: float, cutoff: int) -> dict[str, ModeOperator]:
    """``a_B, a_D, a1, a2, n1, n2`` on the output-port basis for coefficients ``(t, r)``."""
    a_b, a_d = _mode_lowering(cutoff)
    a1 = r * a_b + t * a_d
    a2 = t * a_b - r * a_d
    return {
        "aB": ModeOperator(a_b, "aB"),
        "aD": ModeOperator(a_d, "aD"),
        "a1": ModeOperator(a1, "a1"),
        "a2": ModeOperator(a2, "a2"),
        "n1": ModeOperator(a1.T @ a1, "n1"),
        "n2": ModeOperator(a2.T @ a2, "n2"),
    }


def coherent_amplitudes(alpha: float, cutoff: int) -> np.ndarray:
    """Truncated coherent-state Fock amplitudes ``exp(-|a|^2/2) a^n / sqrt(n!)`` (real ``alpha``)."""
    n = np.arange(cutoff + 1)
    out = np.zeros(cutoff + 1)
    if alpha == 0.0:
        out[0] = 1.0
        return out
    log_mag = -0.5 * alpha * alpha + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    out = np.exp(log_mag)
    if alpha < 0:
        out *= (-1.0) ** n
    return out


def coherent_two_mode(alpha_B: float, alpha_D: float, cutoff: int) -> TwoModeState:
    """Product coherent state ``|alpha_B>_B |alpha_D>_D``.

    Raises :class:`CutoffTooSmall` if either ``alpha**2 > cutoff/4`` or the
    truncation drops more than 1e-8 of the norm.
    """
    if cutoff < 1:
        raise DomainError(f"cutoff must be >= 1, got {cutoff}")
    for name, a in (("alpha_B", alpha_B), ("alpha_D", alpha_D)):
        if a * a > cutoff / 4:
            raise CutoffTooSmall(f"{name}={a:g} needs cutoff >= {math.ceil(4 * a * a)}, got {cutoff}")
    amps = np.outer(coherent_amplitudes(alpha_B, cutoff), coherent_amplitudes(alpha_D, cutoff))
    state = TwoModeState(cutoff, amps.astype(complex))
    if state.leakage >= LEAKAGE_TOL:
        raise CutoffTooSmall(f"truncation leakage {state.leakage:.3g} >= {LEAKAGE_TOL:g} at cutoff {cutoff}")
    return state


def output_amplitudes(alpha: float, delta: float, bs_mode: BSMode | str) -> tuple[float, float]:
    """Output-port coherent amplitudes ``(alpha_B, alpha_D)`` for input amplitude ``alpha``.

    The dark amplitude is ``alpha (t - r)/sqrt(2) = alpha delta``.  For the
    unitary splitter the bright amplitude is ``alpha (t + r)/sqrt(2)``.  The
    first-order coefficients are not unitary, so there the bright amplitude is
    instead solved from ``a1 = r a_B + t a_D`` such that arm 1 still carries
    exactly ``alpha/sqrt(2)``; the two rules coincide when ``t^2 + r^2 = 1``.
    """
    t, r = bs_coefficients(delta, bs_mode)
    alpha_d = alpha * (t - r) / SQRT2
    if BSMode.parse(bs_mode) is BSMode.EXACT_UNITARY:
        alpha_b = alpha * (t + r) / SQRT2
    else:
        alpha_b = (alpha / SQRT2 - t * alpha_d) / r
    return alpha_b, alpha_d


def _weak_values(alpha, delta, bs_mode, cutoff, which):
    t, r = bs_coefficients(delta, bs_mode)
    state = coherent_two_mode(*output_amplitudes(alpha, delta, bs_mode), cutoff)
    ops = mode_operators(t, r, cutoff)
    a_d = ops["aD"]
    psi = state.vector
    # <f~| = <i| a_D  (dark-port click adds a photon to D)
    denom = np.vdot(psi, a_d @ psi)
    if abs(denom) < DENOM_TOL:
        raise DegeneratePostSelection(f"<f|i> = {abs(denom):.3g} below {DENOM_TOL:g}")
    bra = a_d.dag @ psi
    return [complex(np.vdot(bra, ops[k] @ psi) / denom).real for k in which]


def weak_value_exact(alpha: float, delta: float, bs_mode: BSMode | str = BSMode.EXACT_UNITARY,
                     cutoff: int = 40) -> float:
    """Arm-1 photon-number weak value ``<i|a_D n1|i> / <i|a_D|i>``, all orders in ``delta``."""
    return _weak_values(alpha, delta, bs_mode, cutoff, ("n1",))[0]


def weak_value_arms(alpha: float, delta: float, bs_mode: BSMode | str = BSMode.EXACT_UNITARY,
                    cutoff: int = 40) -> tuple[float, float]:
    n1, n2 = _weak_values(alpha, delta, bs_mode, cutoff, ("n1", "n2"))
    return n1, n2


def weak_value_sum(alpha: float, delta: float, bs_mode: BSMode | str = BSMode.EXACT_UNITARY,
                   cutoff: int = 40) -> float:
    """``<n1>_w + <n2>_w``; equals ``|alpha|^2 + 1`` for a unitary splitter."""
    return sum(weak_value_arms(alpha, delta, bs_mode, cutoff))


def single_photon_states(delta: float, bs_mode: BSMode | str) -> tuple[TwoModeState, TwoModeState]:
    """Pre-selected ``|i>`` and post-selected ``|f>`` of one photon, in the arm basis (cutoff 2)."""
    t, r = bs_coefficients(delta, bs_mode)
    pre = np.zeros((3, 3), dtype=complex)
    pre[1, 0] = pre[0, 1] = 1.0 / SQRT2
    post = np.zeros((3, 3), dtype=complex)
    post[1, 0], post[0, 1] = t, -r
    # |f> is normalized only for the unitary splitter
    post /= math.hypot(t, r)
    return TwoModeState(2, pre, ("1", "2")), TwoModeState(2, post, ("1", "2"))


def weak_value_single_photon(delta: float, bs_mode: BSMode | str = BSMode.FIRST_ORDER,
                             arm: int = 1) -> float:
    """``<f|n_arm|i> / <f|i>`` for a single photon; ``t/(t - r)`` for arm 1."""
    if arm not in (1, 2):
        raise DomainError(f"arm must be 1 or 2, got {arm}")
    pre, post = single_photon_states(delta, bs_mode)
    a_first, a_second = _mode_lowering(2)
    a = a_first if arm == 1 else a_second
    n_op = ModeOperator(a.T @ a, f"n{arm}")
    overlap = complex(np.vdot(post.vector, pre.vector))
    if abs(overlap) < DENOM_TOL:
        raise DegeneratePostSelection("t == r: pre- and post-selected states are orthogonal")
    return (n_op.expect(post, pre) / overlap).real


def commutator_defect(cutoff: int) -> np.ndarray:
    """``[a, a^dag] - 1`` for a single truncated mode; nonzero only at the top level."""
    a = annihilation(cutoff)
    return a @ a.T - a.T @ a - np.eye(cutoff + 1)

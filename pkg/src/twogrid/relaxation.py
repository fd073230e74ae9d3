"""Relaxation schedules and the scalar response of the two-level cycle.

The closed-form schedule alpha_j = 1 / (1 - cos(2 pi j / (2m+1))) makes
the scalar response r_m constant in the coupling eigenvalue; this module
evaluates the response both in closed form and through the 2x2
brute-force reduction, and checks the trigonometric product identities
behind the constancy proof.
"""

from dataclasses import dataclass

import mpmath as mp
import numpy as np


class InvalidMError(ValueError):
    """Smoothing count m is outside the schedule's domain."""


class DegenerateXError(ValueError):
    """The trig identity denominator x +/- 1 vanished for the requested sign."""


_SOURCES = ("theorem", "constant", "list")


@dataclass(frozen=True)
class RelaxationSchedule:
    """Pre/post smoothing count ``m`` and relaxation parameters.

    ``source`` records where the alphas came from: "theorem" for the
    closed-form clustering parameters, "constant" for a repeated single
    value, "list" for anything user-supplied.  An empty schedule
    (m = 0) is accepted as the pure-coarse-correction edge case.
    """

    m: int
    alphas: tuple
    source: str = "list"

    def __post_init__(self):
        if self.m < 0 or len(self.alphas) != self.m:
            raise InvalidMError(f"m={self.m} does not match {len(self.alphas)} alphas")
        if self.source not in _SOURCES:
            raise ValueError(f"unknown schedule source {self.source!r}")
        if any(a == 0 for a in self.alphas):
            raise ValueError("relaxation parameters must be nonzero")
        if self.source == "theorem":
            ref = _theorem_alphas(self.m)
            if max(abs(a - b) for a, b in zip(self.alphas, ref)) > 1e-12:
                raise ValueError("alphas inconsistent with the theorem formula")
            prod = np.prod(self.alphas)
            if abs(prod - 2.0 ** self.m / (2 * self.m + 1)) > 1e-12 * prod:
                raise ValueError("alpha product violates 2^m / (2m+1)")


def _theorem_alphas(m: int):
    return tuple(
        1.0 / (1.0 - np.cos(2.0 * np.pi * j / (2 * m + 1))) for j in range(1, m + 1)
    )


def theorem_schedule(m: int) -> RelaxationSchedule:
    """Closed-form schedule that collapses the preconditioned spectrum."""
    if m < 1:
        raise InvalidMError("theorem schedule requires m >= 1")
    return RelaxationSchedule(m=m, alphas=_theorem_alphas(m), source="theorem")


def constant_schedule(alpha: float, m: int) -> RelaxationSchedule:
    if m < 1:
        raise InvalidMError("constant schedule requires m >= 1")
    return RelaxationSchedule(m=m, alphas=(float(alpha),) * m, source="constant")


def schedule_from_alphas(alphas) -> RelaxationSchedule:
    alphas = tuple(float(a) for a in alphas)
    return RelaxationSchedule(m=len(alphas), alphas=alphas, source="list")


def clustered_eigenvalue(m: int) -> float:
    """The single nontrivial eigenvalue 1 - 1/(2m+1)^2 of the cycle."""
    if m < 1:
        raise InvalidMError("clustered eigenvalue requires m >= 1")
    return 1.0 - 1.0 / (2 * m + 1) ** 2


@dataclass(frozen=True)
class ResponseSample:
    """One evaluation of the scalar response r_m at a coupling eigenvalue."""

    lam: complex
    tau: complex
    value: complex


_MP_DPS = 50


def _mp_alphas(schedule: RelaxationSchedule):
    if schedule.source == "theorem":
        # reconstruct the exact parameters from the tag; the stored
        # doubles would otherwise limit the constancy below 1e-12
        m = schedule.m
        return [1 / (1 - mp.cos(2 * mp.pi * j / (2 * m + 1))) for j in range(1, m + 1)]
    return [mp.mpf(a) for a in schedule.alphas]


def _rm_mp(alphas, tau):
    prod_minus = mp.mpc(1)
    prod_plus = mp.mpc(1)
    for a in alphas:
        prod_minus *= ((1 - a) - a * tau) ** 2
        prod_plus *= ((1 - a) + a * tau) ** 2
    return ((1 + tau) * prod_minus + (1 - tau) * prod_plus) / 2


def scalar_response_closed(schedule: RelaxationSchedule, lam: complex) -> ResponseSample:
    """Closed-form scalar response

        r_m = (1+tau)/2 * prod((1-a_i) - a_i tau)^2
            + (1-tau)/2 * prod((1-a_i) + a_i tau)^2

    with tau the principal square root of ``lam``.  Evaluated in
    extended precision: the two branches cancel through several digits
    for clustering schedules, which doubles cannot resolve to the
    1e-12 constancy budget.  The expression is even in tau, so the
    branch choice is immaterial; this is asserted internally.
    """
    lam = complex(lam)
    tau = complex(np.sqrt(complex(lam)))
    with mp.workdps(_MP_DPS):
        alphas = _mp_alphas(schedule)
        tau_mp = mp.sqrt(mp.mpc(lam))
        plus = _rm_mp(alphas, tau_mp)
        minus = _rm_mp(alphas, -tau_mp)
        scale = max(abs(plus), 1.0)
        assert abs(plus - minus) <= 1e-30 * scale, "response not even in tau"
        value = complex(plus)
    return ResponseSample(lam=lam, tau=tau, value=value)


def scalar_response_oracle(schedule: RelaxationSchedule, lam: complex) -> ResponseSample:
    """Brute-force scalar response from the scaled 2x2 reduction.

    Builds E_s(a_i) = [[1-a_i, -a_i tau], [-a_i tau, 1-a_i]] in plain
    double precision, multiplies them out, and applies the rank-one
    coarse factors u = (1, 0)^T and v = (1, tau)^T: the response is
    v^T (prod E_s)^2 u.  Kept independent of the closed form; the
    fixed diagonalizer Q = [[1, 1], [1, -1]]/sqrt(2) is verified on
    every factor as an internal self-test.
    """
    lam = complex(lam)
    tau = complex(np.sqrt(complex(lam)))
    q = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    prod = np.eye(2, dtype=complex)
    for a in schedule.alphas:
        e_s = np.array([[1.0 - a, -a * tau], [-a * tau, 1.0 - a]], dtype=complex)
        diag = q.T @ e_s @ q
        expect = np.array([(1.0 - a) - a * tau, (1.0 - a) + a * tau])
        scale = max(1.0, float(np.abs(e_s).max()))
        assert abs(diag[0, 1]) <= 1e-13 * scale and abs(diag[1, 0]) <= 1e-13 * scale
        assert np.abs(np.diag(diag) - expect).max() <= 1e-12 * scale
        prod = e_s @ prod
    u = np.array([1.0, 0.0], dtype=complex)
    v = np.array([1.0, tau], dtype=complex)
    value = v @ (prod @ (prod @ u))
    return ResponseSample(lam=lam, tau=tau, value=complex(value))


def trig_identity_check(m: int, x: complex, sign: int = 1):
    """Both sides of the product identity over theta_i = 2 pi i / (2m+1):

        prod_i (cos(theta_i) + t) =          (x^(2m+1) + 1) / (2^m x^m (x + 1))
        prod_i (cos(theta_i) - t) = (-1)^m * (x^(2m+1) - 1) / (2^m x^m (x - 1))

    with t = (x + 1/x)/2.  The (-1)^m comes from
    cos(theta) - t = -(x^2 - 2 x cos(theta) + 1) / (2x); it drops out of
    every squared use, which is why the constancy result never sees it.
    ``sign`` picks the variant; returns (lhs, rhs).
    """
    if m < 1:
        raise InvalidMError("identity requires m >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x = complex(x)
    if x == 0:
        raise DegenerateXError("x must be nonzero")
    if abs(x + sign) < 1e-12:
        raise DegenerateXError(f"x = {x} degenerates the sign={sign:+d} denominator")
    t = (x + 1.0 / x) / 2.0
    lhs = 1.0 + 0.0j
    for i in range(1, m + 1):
        lhs *= np.cos(2.0 * np.pi * i / (2 * m + 1)) + sign * t
    rhs = (x ** (2 * m + 1) + sign) / (2.0 ** m * x ** m * (x + sign))
    if sign == -1:
        rhs *= (-1.0) ** m
    return complex(lhs), complex(rhs)

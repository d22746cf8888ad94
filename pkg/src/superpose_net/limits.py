"""Closed-form limiting laws of the superposition model.

Everything here is a deterministic function of the limiting layer-type
distribution and the layers-per-node ratio mu: the compound Poisson degree
law, the limiting bidegree law and its correlation functionals, moment
identities, and power-law tail predictions.  Infinite-support laws are
truncated at a stated tail tolerance and carry their mass defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .errors import (
    HypothesisViolation,
    InvalidLambda,
    ZeroDenominator,
    ZeroP10,
)
from .layers import (
    CrossMoments,
    LayerTypeDistribution,
    cross_moment,
    edge_biased_distribution,
)
from .stats import Pmf1D, Pmf2D, kendall, size_biased, spearman

_MAX_SUPPORT = 1 << 20


@dataclass(frozen=True)
class LimitParams:
    mu: float
    dist: LayerTypeDistribution
    tail_epsilon: float = 1e-10

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not 0.0 < self.tail_epsilon < 1.0:
            raise ValueError(f"tail_epsilon must be in (0,1), got {self.tail_epsilon}")


def increment_pmf(params: LimitParams) -> Pmf1D:
    """Size of one layer's degree contribution at a node it contains.

    A finite mixture of Bin(x-1, y) laws weighted by x * P(x, y); exact.
    """
    p10 = cross_moment(params.dist, 1, 0)
    if p10 <= 0.0:
        raise ZeroP10("increment law undefined: mean layer size is zero")
    top = max(params.dist.max_size - 1, 0)
    out = np.zeros(top + 1)
    for x, y, p in params.dist.atoms():
        if x == 0 or p == 0:
            continue
        trials = x - 1
        weight = x * p / p10
        if trials == 0:
            out[0] += weight
            continue
        # restrict each binomial row to a 10-sigma window; the omitted
        # mass is below double precision
        sd = math.sqrt(trials * y * (1.0 - y))
        lo = max(0, int(trials * y - 10 * sd - 5))
        hi = min(trials, int(trials * y + 10 * sd + 5))
        ks = np.arange(lo, hi + 1)
        out[lo : hi + 1] += weight * binom.pmf(ks, trials, y)
    return Pmf1D(out)


def compound_poisson_pmf(lam: float, g: Pmf1D, tail_epsilon: float = 1e-10) -> Pmf1D:
    """Law of a Poisson(lam)-indexed sum of iid g-distributed increments.

    Evaluated by the standard recursion
        f(0) = exp(-lam (1 - g(0))),
        f(s) = (lam / s) * sum_{k=1}^{s} k g(k) f(s - k),
    truncated at the smallest support where the remaining tail mass drops
    below tail_epsilon.  If the support cap is hit first (heavy-tailed
    increments), the recorded mass defect exceeds tail_epsilon honestly.
    """
    if lam <= 0.0 or not math.isfinite(lam):
        raise InvalidLambda(f"rate must be positive and finite, got {lam}")
    gk = np.trim_zeros(g.probs, "b")
    if len(gk) == 0:
        raise ValueError("increment pmf carries no mass")
    if len(gk) == 1:
        return Pmf1D(np.array([1.0]))  # all increments are zero
    kk = np.arange(len(gk)) * gk
    f = [math.exp(-lam * (1.0 - gk[0]))]
    acc = f[0]
    s = 0
    while 1.0 - acc >= tail_epsilon and s < _MAX_SUPPORT:
        s += 1
        lo = max(0, s - len(gk) + 1)
        window = np.asarray(f[lo:s][::-1])
        val = (lam / s) * float(kk[1 : s - lo + 1] @ window)
        f.append(val)
        acc += val
    probs = np.array(f)
    return Pmf1D(probs, mass_defect=max(0.0, 1.0 - math.fsum(f)))


def limiting_degree_pmf(params: LimitParams) -> Pmf1D:
    """Compound Poisson degree law with rate mu * P_10."""
    p10 = cross_moment(params.dist, 1, 0)
    if p10 <= 0.0:
        raise ZeroP10("degree limit undefined: mean layer size is zero")
    g = increment_pmf(params)
    return compound_poisson_pmf(params.mu * p10, g, params.tail_epsilon)


def fprime2_pmf(params: LimitParams) -> Pmf2D:
    """Joint law of the two extra degrees produced by an edge's own layer.

    Mixture of Bin(x-2, y) x Bin(x-2, y) products over the edge-biased
    layer law; exact and symmetric.
    """
    biased = edge_biased_distribution(params.dist)
    top = max(biased.max_size - 2, 0)
    out = np.zeros((top + 1, top + 1))
    support = np.arange(top + 1)
    for x, y, p in biased.atoms():
        row = binom.pmf(support, x - 2, y)
        out += p * np.outer(row, row)
    return Pmf2D(out)


def _convolve2d(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Direct shift-and-add convolution over the nonzero entries of b."""
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1))
    for u, v in np.argwhere(b > 0):
        out[u : u + a.shape[0], v : v + a.shape[1]] += b[u, v] * a
    return out


def limiting_bidegree_pmf(params: LimitParams) -> Pmf2D:
    """Joint degree law of the endpoints of a random edge, in the limit.

    Shift by (1,1) for the edge itself, convolve the product of two
    independent degree laws with the own-layer contribution.
    """
    f1 = limiting_degree_pmf(params)
    fp2 = fprime2_pmf(params)
    base = np.outer(f1.probs, f1.probs)
    conv = _convolve2d(base, fp2.probs)
    shifted = np.zeros((conv.shape[0] + 1, conv.shape[1] + 1))
    shifted[1:, 1:] = conv
    defect = max(0.0, 1.0 - math.fsum(shifted.ravel().tolist()))
    return Pmf2D(shifted, mass_defect=defect)


def limiting_assortativity(params: LimitParams) -> float:
    """Pearson correlation of the limiting bidegree law, in closed form."""
    cm = CrossMoments.of(params.dist)
    num = cm.p21 * (cm.p43 + cm.p33) - cm.p32**2
    den = (
        cm.p21 * (cm.p43 + cm.p32)
        - cm.p32**2
        + params.mu * cm.p21**2 * (cm.p21 + cm.p32)
    )
    if den <= 0.0:
        raise ZeroDenominator("assortativity denominator vanishes")
    return num / den


@dataclass(frozen=True)
class MomentReport:
    """Moment identities of the limiting laws, all from cross moments."""

    e_h: float          # mean increment
    e_h2: float
    e_h3: float
    e_d: float          # mean limiting degree
    var_d: float
    e_dstar3: float     # third moment of the size-biased degree
    e_dprime: float     # own-layer extra degree
    e_dprime2: float
    var_dprime: float
    cov_dprime: float   # between the two endpoints


def limiting_moments(params: LimitParams) -> MomentReport:
    cm = CrossMoments.of(params.dist)
    if cm.p10 <= 0.0:
        raise ZeroP10("moments undefined: mean layer size is zero")
    if cm.p21 <= 0.0:
        from .errors import ZeroEdgeMass

        raise ZeroEdgeMass("moments undefined: P_21 = 0")
    mu = params.mu
    e_h = cm.p21 / cm.p10
    e_h2 = (cm.p21 + cm.p32) / cm.p10
    e_h3 = (cm.p21 + 3 * cm.p32 + cm.p43) / cm.p10
    lam = mu * cm.p10
    e_dprime = cm.p32 / cm.p21
    e_dprime2 = (cm.p43 + cm.p32) / cm.p21
    return MomentReport(
        e_h=e_h,
        e_h2=e_h2,
        e_h3=e_h3,
        e_d=lam * e_h,
        var_d=lam * e_h2,
        e_dstar3=(
            mu * (cm.p21 + 3 * cm.p32 + cm.p43)
            + 3 * mu**2 * (cm.p21 + cm.p32) * cm.p21
            + mu**3 * cm.p21**3
        ),
        e_dprime=e_dprime,
        e_dprime2=e_dprime2,
        var_dprime=e_dprime2 - e_dprime**2,
        cov_dprime=(cm.p43 + cm.p33) / cm.p21 - e_dprime**2,
    )


@dataclass(frozen=True)
class RankCorrelations:
    kendall: float
    spearman: float
    mass_defect: float


def limiting_rank_correlations(params: LimitParams) -> RankCorrelations:
    f2 = limiting_bidegree_pmf(params)
    return RankCorrelations(
        kendall=kendall(f2),
        spearman=spearman(f2),
        mass_defect=f2.mass_defect,
    )


@dataclass(frozen=True)
class TailPrediction:
    marginal_exponent: float
    c_prime: float
    c_double_prime: float


def tail_prediction(
    alpha: float,
    beta: float,
    b: float,
    mu: float,
    dist: LayerTypeDistribution,
) -> TailPrediction:
    """Power-law tail exponent and constants of the limiting bidegree law.

    The amplitude of the size pmf is taken from the exact normalization of
    the concrete truncated distribution.  All violated hypotheses are
    reported together.
    """
    violations = []
    if not alpha > 2:
        violations.append(f"alpha > 2 fails (alpha = {alpha})")
    if not 0.0 <= beta < 1.0:
        violations.append(f"beta in [0, 1) fails (beta = {beta})")
    if not alpha + beta > 3:
        violations.append(f"alpha + beta > 3 fails (alpha + beta = {alpha + beta})")
    if beta == 0.0 and not b < 1.0:
        violations.append(f"b < 1 required when beta = 0 (b = {b})")
    if violations:
        raise HypothesisViolation(violations)
    a = dist.normalization_amplitude()
    p21 = cross_moment(dist, 2, 1)
    exponent = (alpha - 2) / (1 - beta)
    return TailPrediction(
        marginal_exponent=exponent,
        c_prime=a * b**exponent / ((1 - beta) * p21),
        c_double_prime=mu * a**2 * b ** (2 * exponent) / ((1 - beta) ** 2 * p21),
    )

"""Differentiable penalty for predictions that violate an implication.

For an arrow with predicted truth probabilities p (sufficient side) and q
(necessary side) the penalty is

    loss(p, q) = -(1 - q) * log(1 - p) - p * log(q)

after clamping both probabilities to [eps, 1 - eps].  It is near zero when
p is small or q is large, and it blows up as p -> 1 while q stays below 1,
or as q -> 0 while p stays above 0.  Despite the shape it is not a cross
entropy: both arguments are probabilities of different events, and the two
log terms mix them asymmetrically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

EPSILON = 1e-7

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class LossConfig:
    """Weight of the consistency term and the probability clamp."""

    weight: float
    epsilon: float = EPSILON

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError(f"consistency weight must be nonnegative, got {self.weight!r}")
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 0.5), got {self.epsilon!r}")


@dataclass(frozen=True)
class ProbabilityPair:
    """Predicted truth probabilities for the two ends of one arrow."""

    sufficient: float
    necessary: float


def clamp_probability(p: ArrayLike, epsilon: float = EPSILON) -> ArrayLike:
    """Clip into [epsilon, 1 - epsilon] so the logs below stay finite."""
    return np.clip(p, epsilon, 1.0 - epsilon)


def consistency_loss(
    p_sufficient: ArrayLike, p_necessary: ArrayLike, epsilon: float = EPSILON
) -> ArrayLike:
    """Elementwise implication penalty; accepts scalars or arrays."""
    p = clamp_probability(np.asarray(p_sufficient, dtype=float), epsilon)
    q = clamp_probability(np.asarray(p_necessary, dtype=float), epsilon)
    out = -(1.0 - q) * np.log1p(-p) - p * np.log(q)
    return out if out.ndim else float(out)


def consistency_loss_grad(
    p_sufficient: ArrayLike, p_necessary: ArrayLike, epsilon: float = EPSILON
) -> Tuple[ArrayLike, ArrayLike]:
    """Partials of the penalty with respect to each probability.

    The gradient with respect to the sufficient side is strictly positive and
    the necessary side strictly negative on the interior; where the clamp is
    active the input no longer moves the loss, so the partial is zero.
    """
    p_in = np.asarray(p_sufficient, dtype=float)
    q_in = np.asarray(p_necessary, dtype=float)
    p = clamp_probability(p_in, epsilon)
    q = clamp_probability(q_in, epsilon)
    grad_p = (1.0 - q) / (1.0 - p) - np.log(q)
    grad_q = np.log1p(-p) - p / q
    p_active = (p_in >= epsilon) & (p_in <= 1.0 - epsilon)
    q_active = (q_in >= epsilon) & (q_in <= 1.0 - epsilon)
    grad_p = np.where(p_active, grad_p, 0.0)
    grad_q = np.where(q_active, grad_q, 0.0)
    if grad_p.ndim == 0:
        return float(grad_p), float(grad_q)
    return grad_p, grad_q


def joint_loss(
    task_loss: float, pairs: Sequence[ProbabilityPair], config: LossConfig
) -> float:
    """Task loss plus the weighted mean penalty over the given arrows.

    With no pairs the task loss passes through unchanged.
    """
    if task_loss < 0:
        raise ValueError(f"task loss must be nonnegative, got {task_loss!r}")
    if not pairs:
        return float(task_loss)
    p = np.array([pair.sufficient for pair in pairs], dtype=float)
    q = np.array([pair.necessary for pair in pairs], dtype=float)
    penalty = consistency_loss(p, q, config.epsilon)
    return float(task_loss + config.weight * np.mean(penalty))

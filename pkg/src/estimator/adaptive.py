"""
Adaptive penalties across a list of models.

@help.category Estimator
@help.title Adaptive Penalty Construction
@help.description L0(k) = k sqrt(2) + 2 log S_k cancels each model's own Kraft sum S_k, so the
class sum is sum_k exp(-k/sqrt(2)), at most exp(-1/sqrt(2))/(1 - exp(-1/sqrt(2))) = 0.9727.
"""
import math
from typing import List, Sequence, Tuple

from src.estimator.mle import kraft_sum
from src.estimator.penalty import AdaptivePenalty, Penalty
from src.grid.lattice import EpsGrid

SQRT2 = math.sqrt(2.0)
CLASS_KRAFT_BOUND = math.exp(-1.0 / SQRT2) / (1.0 - math.exp(-1.0 / SQRT2))


def build_adaptive_penalty(per_model_sums: Sequence[float],
                           per_model: Sequence[Tuple[EpsGrid, Penalty]] = ()) -> AdaptivePenalty:
    """
    Adaptive penalty with L0(k) = k sqrt(2) + 2 log S_k, k = 1..K.

    @help.example
        build_adaptive_penalty([5.0]).l0  # [4.6334]
    """
    if not per_model_sums:
        raise ValueError("at least one model is required")
    for k, s in enumerate(per_model_sums, start=1):
        if not (s > 0 and math.isfinite(s)):
            raise ValueError(f"S_{k} must be finite and positive, got {s!r}")
    l0 = [k * SQRT2 + 2.0 * math.log(s) for k, s in enumerate(per_model_sums, start=1)]
    class_sum = math.fsum(math.exp(-0.5 * l) * s for l, s in zip(l0, per_model_sums))
    return AdaptivePenalty(l0, list(per_model) or None, class_kraft_sum=class_sum)


def adaptive_penalty_from_models(per_model: List[Tuple[EpsGrid, Penalty]]) -> AdaptivePenalty:
    """Computes S_k with kraft_sum and builds the adaptive penalty."""
    sums = [kraft_sum(grid, penalty).value for grid, penalty in per_model]
    return build_adaptive_penalty(sums, per_model)

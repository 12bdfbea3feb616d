# src/numeric/domain/services/gradient_check.py
"""Central finite-difference validation of analytic gradients."""

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from src.numeric.domain.entities.tensor import Parameter, Tensor, backward, no_grad

RELATIVE_ERROR_FLOOR = 1e-5
# Multiples of the float64 round-off of one central difference tolerated as noise.
ROUNDOFF_MARGIN = 100.0


def relative_error(analytic: float, numeric: float, floor: float = RELATIVE_ERROR_FLOOR) -> float:
    """``|a - n| / max(|a| + |n|, floor)``."""
    return abs(analytic - numeric) / max(abs(analytic) + abs(numeric), floor)


def noise_floor(loss_value: float, step: float, tolerance: float) -> float:
    """Gradient magnitude below which a difference is indistinguishable from round-off.

    A central difference of a loss of size ``|L|`` carries an absolute error of
    about ``eps * |L| / step``. Entries whose gradients are that small are judged
    on the absolute difference, which passes when it stays within
    ``ROUNDOFF_MARGIN`` times that round-off.
    """
    roundoff = float(np.finfo(np.float64).eps) * abs(loss_value) / step
    return max(RELATIVE_ERROR_FLOOR, ROUNDOFF_MARGIN * roundoff / tolerance)


@dataclass
class GroupResult:
    """Worst entry found in one parameter group."""

    group: str
    max_relative_error: float = 0.0
    worst_parameter: str = ""
    entries_checked: int = 0


@dataclass
class GradientCheckReport:
    results: dict[str, GroupResult] = field(default_factory=dict)

    def max_error(self) -> float:
        return max((r.max_relative_error for r in self.results.values()), default=0.0)

    def failing_groups(self, tolerance: float) -> list[str]:
        return [g for g, r in self.results.items() if r.max_relative_error >= tolerance]


def check_gradients(
    loss_fn: Callable[[], Tensor],
    named_params: Sequence[tuple[str, Parameter]],
    group_of: Callable[[str], str],
    rng: np.random.Generator,
    step: float = 1e-5,
    max_entries: int | None = None,
    corrupt_group: str | None = None,
    tolerance: float = 1e-4,
) -> GradientCheckReport:
    """Compare the tape gradient of ``loss_fn`` against central differences.

    ``loss_fn`` must rebuild the graph on every call. Every entry of every
    parameter is checked unless ``max_entries`` asks for a random subset per
    tensor. ``corrupt_group`` perturbs the analytic gradient of one group to
    prove the check can fail. ``tolerance`` sets the round-off floor, see
    :func:`noise_floor`.
    """
    for _, param in named_params:
        param.zero_grad()
    loss = loss_fn()
    floor = noise_floor(loss.item(), step, tolerance)
    backward(loss)

    analytic = {name: param.grad.copy() for name, param in named_params}  # type: ignore[union-attr]
    if corrupt_group is not None:
        for name in analytic:
            if group_of(name) == corrupt_group:
                analytic[name] = analytic[name] + 1.0

    report = GradientCheckReport()
    for name, param in named_params:
        group = group_of(name)
        result = report.results.setdefault(group, GroupResult(group=group))

        flat = param.data.reshape(-1)
        indices = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries:
            indices = np.sort(rng.choice(flat.size, size=max_entries, replace=False))

        grad_flat = analytic[name].reshape(-1)
        for i in indices:
            original = flat[i]
            with no_grad():
                flat[i] = original + step
                plus = loss_fn().item()
                flat[i] = original - step
                minus = loss_fn().item()
            flat[i] = original

            numeric = (plus - minus) / (2.0 * step)
            err = relative_error(float(grad_flat[i]), numeric, floor)
            result.entries_checked += 1
            if err > result.max_relative_error:
                result.max_relative_error = err
                result.worst_parameter = name

    return report

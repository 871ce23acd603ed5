"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .tensor import Tensor


@dataclass
class GradCheckReport:
    passed: bool
    max_rel_err: float
    n_elements: int
    worst: tuple | None = None   # (tensor index, flat element index)
    message: str = ""

    def __bool__(self) -> bool:
        return self.passed


def grad_check(fn: Callable[[], Tensor], wrt: Sequence[Tensor],
               eps: float = 1e-6, tol: float = 1e-5) -> GradCheckReport:
    """Compare analytic gradients of ``fn()`` against central differences.

    ``fn`` must rebuild its graph on every call and return a scalar;
    ``wrt`` lists the tensors to perturb (parameters and/or inputs),
    which must be float64 for the differences to resolve. Relative
    error uses ``|a - n| / max(|a|, |n|, 1)`` so near-zero gradients are
    held to an absolute ``tol``.
    """
    for i, t in enumerate(wrt):
        if t.data.dtype != np.float64:
            return GradCheckReport(False, np.inf, 0, (i, -1),
                                   "grad_check requires float64 tensors")
        t.zero_grad()

    out = fn()
    if out.size != 1:
        raise ValueError("grad_check target must be scalar")
    if not np.isfinite(out.data).all():
        return GradCheckReport(False, np.inf, 0, None, "non-finite forward value")
    out.backward()

    analytic = []
    for t in wrt:
        g = t.grad if t.grad is not None else np.zeros_like(t.data)
        if not np.isfinite(g).all():
            return GradCheckReport(False, np.inf, 0, None, "non-finite analytic gradient")
        analytic.append(g.copy())

    max_rel = 0.0
    worst = None
    n_checked = 0
    for ti, t in enumerate(wrt):
        flat = t.data.reshape(-1)
        a_flat = analytic[ti].reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + eps
            f_plus = fn().data.item()
            flat[j] = orig - eps
            f_minus = fn().data.item()
            flat[j] = orig
            if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                return GradCheckReport(False, np.inf, n_checked, (ti, j),
                                       "non-finite perturbed value")
            numeric = (f_plus - f_minus) / (2.0 * eps)
            rel = abs(a_flat[j] - numeric) / max(abs(a_flat[j]), abs(numeric), 1.0)
            n_checked += 1
            if rel > max_rel:
                max_rel = rel
                worst = (ti, j)
    passed = max_rel <= tol
    msg = "" if passed else f"max rel err {max_rel:.3e} at tensor {worst[0]} element {worst[1]}"
    return GradCheckReport(passed, max_rel, n_checked, worst, msg)

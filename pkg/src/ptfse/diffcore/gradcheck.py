"""Finite-difference verification of analytic gradients.

Checks run in float64 regardless of the tensors passed in; the function
under test is re-invoked per probed coordinate, so keep probe counts
small for big graphs (use max_coords).
"""

import numpy as np

from ..errors import InvalidInputError
from .tensor import DiffTensor

REL_ERR_FLOOR = 1e-8


def _as_scalar(out) -> float:
    if not isinstance(out, DiffTensor) or out.size != 1:
        raise InvalidInputError("grad_check: function under test must return a scalar DiffTensor")
    return float(out.data.reshape(-1)[0])


def _pick_coords(n: int, max_coords, rng) -> np.ndarray:
    if max_coords is None or max_coords >= n:
        return np.arange(n)
    return rng.choice(n, size=max_coords, replace=False)


def grad_check(f, x, fd_step: float = 1e-3, max_coords=None, seed: int = 0,
               skip_kinks: bool = False) -> float:
    """Max relative error between analytic and central-difference gradients.

    f maps a DiffTensor to a scalar DiffTensor. Relative error per
    coordinate is |a - n| / max(|a|, |n|, 1e-8).
    """
    return grad_check_params(
        lambda ts: f(ts["x"]),
        {"x": x},
        fd_step=fd_step,
        max_coords=max_coords,
        seed=seed,
        skip_kinks=skip_kinks,
    )


def grad_check_params(
    f, tensors: dict, fd_step: float = 1e-3, max_coords=None, seed: int = 0,
    skip_kinks: bool = False,
) -> float:
    """grad_check over a dict of tensors, probing each one.

    f receives a dict with the same keys whose values are float64
    DiffTensors with requires_grad set; it must read the tensors it is
    given (not close over the originals). max_coords bounds the probe
    count per tensor; coordinates are chosen with a seeded RNG.

    skip_kinks makes the probe ignore coordinates where the two one-sided
    slopes disagree by more than half the gradient scale. A step across a
    relu corner breaks the symmetry central differences rely on, so such
    coordinates carry no information about the analytic gradient; smooth
    coordinates stay symmetric to O(step^2) and are always kept.
    """
    rng = np.random.default_rng(seed)
    work = {
        k: DiffTensor(np.asarray(t.data if isinstance(t, DiffTensor) else t,
                                 dtype=np.float64).copy(), requires_grad=True)
        for k, t in tensors.items()
    }
    out = f(work)
    _as_scalar(out)
    out.backward()
    analytic = {
        k: (t.grad if t.grad is not None else np.zeros_like(t.data))
        for k, t in work.items()
    }
    for t in work.values():
        t.requires_grad = False  # numeric passes need no graph
    base = _as_scalar(f(work)) if skip_kinks else None

    worst = 0.0
    for key, tensor in work.items():
        flat = tensor.data.reshape(-1)
        a_flat = analytic[key].reshape(-1)
        for idx in _pick_coords(flat.size, max_coords, rng):
            keep = flat[idx]
            flat[idx] = keep + fd_step
            plus = _as_scalar(f(work))
            flat[idx] = keep - fd_step
            minus = _as_scalar(f(work))
            flat[idx] = keep
            numeric = (plus - minus) / (2.0 * fd_step)
            a = float(a_flat[idx])
            scale = max(abs(a), abs(numeric), REL_ERR_FLOOR)
            if skip_kinks:
                asymmetry = abs((plus - base) - (base - minus)) / fd_step
                if asymmetry > 0.5 * scale:
                    continue
            err = abs(a - numeric) / scale
            if err > worst:
                worst = err
    return worst

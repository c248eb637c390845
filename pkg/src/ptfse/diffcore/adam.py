"""Adam optimizer with bias correction, plus the staged learning-rate rule."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError
from .tensor import DiffTensor


def _raw(value) -> np.ndarray:
    return value.data if isinstance(value, DiffTensor) else np.asarray(value)


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


def init_adam(params, beta1: float = 0.9, beta2: float = 0.999,
              epsilon: float = 1e-8) -> AdamState:
    m = {k: np.zeros_like(_raw(p)) for k, p in params.items()}
    v = {k: np.zeros_like(_raw(p)) for k, p in params.items()}
    return AdamState(m=m, v=v, step_count=0, beta1=beta1, beta2=beta2, epsilon=epsilon)


def adam_step(params: dict, grads: dict, state: AdamState, lr: float):
    """One bias-corrected Adam update. Pure: returns (new_params, new_state).

    params and grads are dicts of same-keyed arrays (DiffTensors allowed);
    a missing or None gradient leaves that parameter untouched while still
    advancing its moments with a zero gradient.
    """
    t = state.step_count + 1
    b1, b2, eps = state.beta1, state.beta2, state.epsilon
    new_params, new_m, new_v = {}, {}, {}
    for key, p in params.items():
        p = _raw(p)
        g = grads.get(key)
        g = np.zeros_like(p) if g is None else _raw(g)
        if g.shape != p.shape:
            raise ShapeError(
                f"adam_step: gradient {g.shape} does not match parameter "
                f"{p.shape} for {key!r}"
            )
        m = b1 * state.m[key] + (1.0 - b1) * g
        v = b2 * state.v[key] + (1.0 - b2) * (g * g)
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        new_params[key] = p - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[key] = m
        new_v[key] = v
    return new_params, AdamState(
        m=new_m, v=new_v, step_count=t, beta1=b1, beta2=b2, epsilon=eps
    )


def staged_learning_rate(epoch_index: int, initial: float = 1e-3,
                         after: float = 3e-4, switch_epoch: int = 100) -> float:
    """initial for epoch indices below switch_epoch, after from there on."""
    return initial if epoch_index < switch_epoch else after

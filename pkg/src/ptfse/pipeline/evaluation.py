"""Metric evaluation of an enhanced clip against its reference."""

import warnings
from dataclasses import dataclass

from ..metrics import MetricResult, si_sdr, stoi
from ..signal import Waveform


@dataclass
class EvaluationRecord:
    si_sdr_db: float
    stoi: float

    def metrics(self) -> list:
        return [MetricResult("si_sdr_db", self.si_sdr_db),
                MetricResult("stoi", self.stoi)]

    def line(self) -> str:
        return " ".join(m.line_fragment() for m in self.metrics())


def evaluate(est: Waveform, ref: Waveform) -> EvaluationRecord:
    """Score `est` against `ref`, trimming both to the shorter length.

    A length mismatch beyond 10% of the longer clip draws a warning but
    still evaluates on the overlap.
    """
    n_est, n_ref = len(est), len(ref)
    shorter, longer = min(n_est, n_ref), max(n_est, n_ref)
    if longer - shorter > 0.1 * longer:
        warnings.warn(
            f"evaluate: lengths differ by more than 10% ({n_est} vs {n_ref}); "
            f"trimming to {shorter}",
            stacklevel=2,
        )
    est_s = est.samples[:shorter]
    ref_s = ref.samples[:shorter]
    return EvaluationRecord(
        si_sdr_db=si_sdr(est_s, ref_s),
        stoi=stoi(est_s, ref_s, fs=ref.sample_rate),
    )

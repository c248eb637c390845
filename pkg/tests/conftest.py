"""Shared fixtures: a small deterministic WAV corpus for pipeline tests."""

import numpy as np
import pytest

from ptfse.signal import Waveform, synth_clip, write_wav

NOISE_KINDS = ("noise_white", "noise_pink", "noise_babble")


def make_pools(num_clips=8, seconds=2.0, base_seed=300):
    cleans = [synth_clip("speechlike", seconds, seed=base_seed + i)
              for i in range(num_clips)]
    noises = [synth_clip(NOISE_KINDS[i % 3], seconds, seed=base_seed + 100 + i)
              for i in range(num_clips)]
    return cleans, noises


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    """clean/ and noise/ dirs with 8 two-second clips each."""
    root = tmp_path_factory.mktemp("corpus")
    (root / "clean").mkdir()
    (root / "noise").mkdir()
    cleans, noises = make_pools()
    for i, (c, n) in enumerate(zip(cleans, noises)):
        write_wav(root / "clean" / f"clip{i}.wav", c)
        write_wav(root / "noise" / f"clip{i}.wav", n)
    return root


@pytest.fixture(scope="session")
def toy_pools():
    cleans, noises = make_pools()
    return cleans, noises


def random_waveform(seed, n=16000, scale=0.3):
    rng = np.random.default_rng(seed)
    return Waveform(rng.standard_normal(n) * scale, 16000)

"""Full-band/sub-band monaural speech enhancement.

Subpackages:
  signal    STFT/iSTFT, mixing, synthetic clips, WAV I/O
  diffcore  reverse-mode autodiff, layers, Adam, checkpoints
  masking   complex ratio masks, band partition, band-pooled losses
  model     the enhancement network and its configuration
  pipeline  dataset synthesis, training, inference, evaluation
  metrics   SI-SDR and STOI
"""

__version__ = "0.1.0"

from . import errors

__all__ = ["errors", "__version__"]

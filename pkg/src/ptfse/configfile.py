"""Line-oriented `key = value` config files for model and training setup.

Every ModelConfig and TrainConfig field has a key. `loss_kind` and
`drop_band_groups` exist on both configs and are set from the single
shared key. Unknown keys are rejected naming the key and line; missing
keys take the dataclass defaults. Saving echoes every field, so a
load -> save -> load round trip is idempotent.
"""

from .errors import InvalidConfigError
from .model import ModelConfig
from .pipeline import TrainConfig


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float_tuple(text: str) -> tuple:
    parts = [p.strip() for p in text.split(",")]
    if not all(parts):
        raise ValueError(f"empty entry in list: {text!r}")
    return tuple(float(p) for p in parts)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


_MODEL_INT = ("n_fft", "hop", "tau", "context", "full_hidden", "sub_hidden",
              "ttrans_hidden", "ttrans_fc", "ftrans_conv1d_kernel")
_TRAIN_INT = ("epochs", "steps_per_epoch", "batch_size", "lr_switch_epoch", "seed")
_TRAIN_FLOAT = ("lr_initial", "lr_after", "clip_seconds")

# key -> (owner set, parser); owner "both" fans out to the two configs
CONFIG_KEYS = {}
for _k in _MODEL_INT:
    CONFIG_KEYS[_k] = ("model", int)
for _k in ("enable_f_trans", "enable_t_trans"):
    CONFIG_KEYS[_k] = ("model", _parse_bool)
CONFIG_KEYS["loss_weights"] = ("model", _parse_float_tuple)
for _k in _TRAIN_INT:
    CONFIG_KEYS[_k] = ("train", int)
for _k in _TRAIN_FLOAT:
    CONFIG_KEYS[_k] = ("train", float)
CONFIG_KEYS["snr_range_db"] = ("train", _parse_float_tuple)
CONFIG_KEYS["loss_kind"] = ("both", str.strip)
CONFIG_KEYS["drop_band_groups"] = ("both", int)


def parse_config_text(text: str) -> dict:
    """key -> parsed value for the keys present; errors name key and line."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidConfigError(
                f"line {lineno}: expected 'key = value', got {raw!r}"
            )
        key, _, value_text = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise InvalidConfigError(f"unknown config key {key!r} on line {lineno}")
        if key in values:
            raise InvalidConfigError(f"duplicate config key {key!r} on line {lineno}")
        _, parser = CONFIG_KEYS[key]
        try:
            values[key] = parser(value_text.strip())
        except ValueError as exc:
            raise InvalidConfigError(
                f"bad value for key {key!r} on line {lineno}: {exc}"
            ) from exc
    return values


def configs_from_values(values: dict):
    """Build (ModelConfig, TrainConfig) from parsed keys plus defaults."""
    model_kwargs, train_kwargs = {}, {}
    for key, value in values.items():
        owner, _ = CONFIG_KEYS[key]
        if owner in ("model", "both"):
            model_kwargs[key] = value
        if owner in ("train", "both"):
            train_kwargs[key] = value
    return ModelConfig(**model_kwargs), TrainConfig(**train_kwargs)


def load_config(path):
    """Parse a config file into (ModelConfig, TrainConfig)."""
    with open(path, encoding="utf-8") as handle:
        return configs_from_values(parse_config_text(handle.read()))


def config_text(model_cfg: ModelConfig, train_cfg: TrainConfig) -> str:
    """Echo every field as `key = value` lines in a stable order."""
    lines = []
    for key in CONFIG_KEYS:
        owner, _ = CONFIG_KEYS[key]
        source = model_cfg if owner in ("model", "both") else train_cfg
        lines.append(f"{key} = {_format_value(getattr(source, key))}")
    return "\n".join(lines) + "\n"


def save_config(path, model_cfg: ModelConfig, train_cfg: TrainConfig) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(config_text(model_cfg, train_cfg))

"""Environment configuration."""

import logging
import os
from dataclasses import dataclass
from fractions import Fraction

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 2
DEFAULT_SEED = 0
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_H = "1"

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

_ENV_DOC = """\
Variables read by gaugeloc (all optional):
  GAUGELOC_THREADS    worker cap for independent analyses (integer >= 1)
  GAUGELOC_MARGIN     default time margin in slices (integer >= 1, default 2)
  GAUGELOC_SEED       seed for randomized property sweeps (integer, default 0)
  GAUGELOC_LOG_LEVEL  DEBUG, INFO, WARNING, ERROR or CRITICAL (default WARNING)
  GAUGELOC_H          positive rational coupling h, e.g. 1 or 3/2 (default 1)"""


@dataclass(frozen=True)
class Config:
    threads: int
    margin: int
    seed: int
    log_level: str
    h: Fraction
    verify_extra: bool = False

    def with_overrides(self, **changes) -> "Config":
        """Return a copy with the non-None keyword values applied."""
        values = {k: v for k, v in changes.items() if v is not None}
        return Config(**{**self.__dict__, **values})


def _parse_int(name: str, raw: str, minimum: int | None, errors: list[str]) -> int | None:
    try:
        value = int(raw)
    except ValueError:
        errors.append(f"{name}={raw!r} is not an integer.")
        return None
    if minimum is not None and value < minimum:
        errors.append(f"{name}={value} must be at least {minimum}.")
        return None
    return value


def load_config(environ=None) -> Config:
    """Read the ``GAUGELOC_*`` variables and validate them all at once.

    Every bad value is collected before anything is raised, so a single
    ``RuntimeError`` lists every problem instead of failing on the first one.
    """
    env = os.environ if environ is None else environ
    errors: list[str] = []

    threads = os.cpu_count() or 1
    raw = env.get("GAUGELOC_THREADS")
    if raw:
        threads = _parse_int("GAUGELOC_THREADS", raw, 1, errors) or threads

    margin = _parse_int("GAUGELOC_MARGIN", env.get("GAUGELOC_MARGIN", str(DEFAULT_MARGIN)), 1, errors)
    seed = _parse_int("GAUGELOC_SEED", env.get("GAUGELOC_SEED", str(DEFAULT_SEED)), None, errors)

    log_level = env.get("GAUGELOC_LOG_LEVEL", DEFAULT_LOG_LEVEL).upper()
    if log_level not in _LEVELS:
        errors.append(f"GAUGELOC_LOG_LEVEL={log_level!r} is not one of {', '.join(_LEVELS)}.")

    h = None
    raw_h = env.get("GAUGELOC_H", DEFAULT_H)
    try:
        h = Fraction(raw_h)
    except (ValueError, ZeroDivisionError):
        errors.append(f"GAUGELOC_H={raw_h!r} is not a rational number.")
    else:
        if h <= 0:
            errors.append(f"GAUGELOC_H={raw_h} must be positive.")

    if errors:
        bullet_list = "\n  • ".join(errors)
        raise RuntimeError(
            f"gaugeloc configuration is invalid; fix the following variables:\n"
            f"  • {bullet_list}\n\n"
            f"{_ENV_DOC}"
        )

    return Config(threads=threads, margin=margin, seed=seed, log_level=log_level, h=h)

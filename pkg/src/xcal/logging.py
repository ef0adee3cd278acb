from __future__ import annotations

import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, MutableMapping

import structlog


LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}

# field suffix -> decimals, same precision as the trace CSV columns
FIELD_PRECISION = {"_s": 9, "_c": 6, "_hz": 3, "_ppm": 3}

# last init_logging arguments, replayed in worker processes
_settings: tuple[bool, int] = (True, logging.INFO)


def parse_level(name: str | None) -> int:
    """Map a CLI level name to a stdlib level; unknown names fall back to INFO."""
    return LEVELS.get(str(name or "").lower(), logging.INFO)


def round_sim_fields(_logger: Any, _method: str, event_dict: MutableMapping[str, Any]) -> MutableMapping[str, Any]:
    """Round float fields such as ``t_s`` or ``rf_ppm`` to the trace precision.

    Simulation times are sums of sub-steps, so 12.299999999 and 12.3 would
    otherwise appear side by side in ``log.jsonl``.
    """
    for key, value in event_dict.items():
        if not isinstance(value, float):
            continue
        for suffix, digits in FIELD_PRECISION.items():
            if key.endswith(suffix):
                event_dict[key] = round(value, digits) + 0.0
                break
    return event_dict


def init_logging(json: bool = True, level: int | None = None) -> None:
    """Configure structured logging.

    - Logs go to stderr; stdout is reserved for the JSON result
    - JSON or key-value console renderer
    """

    global _settings
    _settings = (json, level if level is not None else logging.INFO)
    handlers = [logging.StreamHandler(sys.stderr)]

    logging.basicConfig(
        level=(level if level is not None else logging.INFO),
        handlers=handlers,
        format="%(message)s",
        force=True,
    )

    shared_processors = [
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.contextvars.merge_contextvars,
        round_sim_fields,
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]

    if json:
        renderer = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer()

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            *shared_processors,
            renderer,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


def add_file_json_logger(path: Path, level: int = logging.INFO) -> logging.Handler:
    """Attach a JSONL file handler to the root logger and return it."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fh = logging.FileHandler(path, encoding="utf-8")
    fh.setLevel(level)
    fh.setFormatter(logging.Formatter("%(message)s"))
    logging.getLogger().addHandler(fh)
    return fh


@contextmanager
def run_log(path: Path, **context: Any) -> Iterator[logging.Handler]:
    """Write one run's events to ``path`` with ``context`` bound to every line.

    The handler and the bound context are removed on exit, so several runs in
    one process (tests, sweeps) do not leak into each other's ``log.jsonl``.
    """
    handler = add_file_json_logger(path)
    structlog.contextvars.bind_contextvars(**context)
    try:
        yield handler
    finally:
        structlog.contextvars.unbind_contextvars(*context)
        logging.getLogger().removeHandler(handler)
        handler.close()


def current_settings() -> tuple[bool, int]:
    """``(json, level)`` of the last ``init_logging`` call, for pool initializers."""
    return _settings

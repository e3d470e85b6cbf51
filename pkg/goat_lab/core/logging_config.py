from __future__ import annotations

import json
import logging
import logging.config
from datetime import datetime, timezone

from .run_context import get_run_id, get_run_tags
from ..utils.serialization import to_jsonable


class LabJSONFormatter(logging.Formatter):
    """Format logs as JSON with the current run id and any `extra` fields."""

    def format(self, record: logging.LogRecord) -> str:
        log_payload = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "pathname": record.pathname,
            "lineno": record.lineno,
            "function": record.funcName,
            "run_id": get_run_id("-"),
        }
        tags = get_run_tags()
        if tags is not None:
            log_payload["run"] = tags.as_dict()

        default_keys = {
            "name",
            "msg",
            "args",
            "levelname",
            "levelno",
            "pathname",
            "filename",
            "module",
            "exc_info",
            "exc_text",
            "stack_info",
            "lineno",
            "funcName",
            "created",
            "msecs",
            "relativeCreated",
            "thread",
            "threadName",
            "processName",
            "process",
            "message",
            "taskName",
            "run_id",
            "run_tags",
        }

        extras = {
            key: value
            for key, value in record.__dict__.items()
            if key not in default_keys and not key.startswith("_")
        }

        if extras:
            log_payload["extra"] = extras

        if record.exc_info:
            log_payload["exception"] = self.formatException(record.exc_info)

        return json.dumps(to_jsonable(log_payload), ensure_ascii=False)


class RunIdFilter(logging.Filter):
    """Ensure the run id and training tags are available on the log record for traditional formatters."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run_id = get_run_id("-")
        tags = get_run_tags()
        record.run_tags = str(tags) if tags is not None else "-"
        return True


def configure_logging(level: str = "INFO", fmt: str = "json") -> None:
    """Configure root logging for the command-line tool."""
    logging_config = {
        "version": 1,
        "disable_existing_loggers": False,
        "filters": {
            "run_id": {
                "()": RunIdFilter,
            },
        },
        "formatters": {
            "json": {
                "()": LabJSONFormatter,
            },
            "console": {
                "format": "%(asctime)s | %(levelname)s | %(run_id)s | %(run_tags)s | %(name)s | %(message)s",
            },
        },
        "handlers": {
            "default": {
                "class": "logging.StreamHandler",
                "stream": "ext://sys.stderr",
                "level": level,
                "formatter": "console" if fmt == "console" else "json",
                "filters": ["run_id"],
            },
        },
        "root": {
            "level": level,
            "handlers": ["default"],
        },
    }

    logging.config.dictConfig(logging_config)


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)

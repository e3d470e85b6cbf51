"""
Per-run logging context.

Two context variables travel with every log record: the command's run id, and the identity of the
training cell currently running (algorithm tag, seed, dataset label). Sweep cells run in worker
processes, so each cell binds its own tags inside the trainer rather than inheriting them.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar, Token
from dataclasses import asdict, dataclass
from typing import Dict, Iterator, Optional
from uuid import uuid4

_run_id_ctx: ContextVar[Optional[str]] = ContextVar("run_id", default=None)


@dataclass(frozen=True)
class RunTags:
    algorithm: str
    seed: int
    dataset: str

    def as_dict(self) -> Dict[str, object]:
        return asdict(self)

    def __str__(self) -> str:
        return f"{self.algorithm}/seed={self.seed}/{self.dataset}"


_run_tags_ctx: ContextVar[Optional[RunTags]] = ContextVar("run_tags", default=None)


def new_run_id(prefix: str = "run") -> str:
    return f"{prefix}-{uuid4().hex[:12]}"


def set_run_id(run_id: Optional[str] = None) -> Token:
    return _run_id_ctx.set(run_id or new_run_id())


def get_run_id(default: Optional[str] = None) -> Optional[str]:
    return _run_id_ctx.get(default)


def reset_run_id(token: Optional[Token] = None) -> None:
    if token:
        _run_id_ctx.reset(token)
    else:
        _run_id_ctx.set(None)


def get_run_tags() -> Optional[RunTags]:
    return _run_tags_ctx.get()


@contextmanager
def training_scope(algorithm: str, seed: int, dataset: str) -> Iterator[RunTags]:
    """Tag every log record emitted inside the block with the training cell; nested scopes restore on exit."""
    tags = RunTags(algorithm=algorithm, seed=int(seed), dataset=dataset)
    token = _run_tags_ctx.set(tags)
    try:
        yield tags
    finally:
        _run_tags_ctx.reset(token)

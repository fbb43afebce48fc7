"""Service configuration: flags, environment variables, defaults.

Every knob can come from the environment (MEMENTOVIZ_* variables) or from
command-line flags; flags win. Archive endpoint templates are overridable
so test fixtures and self-hosted archives can stand in for the real ones.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..archives import (
    AIT_TIMEMAP_TEMPLATE,
    DEFAULT_USER_AGENT,
    IA_TIMEMAP_TEMPLATE,
    ArchiveEndpoints,
)
from ..sampling import SamplingConfig

ENV_PREFIX = "MEMENTOVIZ_"


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8400
    cache_dir: Path = Path("cache")
    user_agent: str = DEFAULT_USER_AGENT
    fetch_timeout: float = 30.0

    render_backend: str = "stub"  # "stub" | "cdp"
    cdp_endpoint: str = "http://127.0.0.1:9222"
    render_workers: int = 4  # archives are rate-sensitive; keep this low
    render_timeout: float = 30.0
    base_settle_wait: float = 3.0
    viewport_width: int = 1024
    viewport_height: int = 768
    thumbnail_width: int = 240
    raw_memento_urls: bool = False  # render id_ URLs to skip archive banners

    job_ttl_seconds: float = 3600.0
    thumbnail_cache_max_bytes: int = 512 * 1024 * 1024
    public_base_url: str | None = None  # absolute base for embed iframe src
    frontend_dir: Path | None = None  # static UI bundle to serve at /ui

    ia_timemap_template: str = IA_TIMEMAP_TEMPLATE
    ait_timemap_template: str = AIT_TIMEMAP_TEMPLATE

    sampling: SamplingConfig = field(default_factory=SamplingConfig)

    def endpoints(self) -> ArchiveEndpoints:
        return ArchiveEndpoints(self.ia_timemap_template, self.ait_timemap_template)

    @property
    def viewport(self) -> tuple[int, int]:
        return (self.viewport_width, self.viewport_height)

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "ServiceConfig":
        environ = os.environ if environ is None else environ
        kwargs = {}
        for spec in fields(cls):
            if spec.name == "sampling":
                continue
            raw = environ.get(ENV_PREFIX + spec.name.upper())
            if raw is None:
                continue
            kwargs[spec.name] = _coerce(spec.type, raw)
        return cls(**kwargs)


def _coerce(annotation: object, raw: str):
    text = str(annotation)
    if "bool" in text:
        return raw.lower() in ("1", "true", "yes", "on")
    if "int" in text:
        return int(raw)
    if "float" in text:
        return float(raw)
    if "Path" in text:
        return Path(raw)
    return raw

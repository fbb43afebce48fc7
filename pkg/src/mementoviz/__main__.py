"""Command-line entry point: configure and run the HTTP service."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

import uvicorn

from .sampling import SamplingConfig
from .service.app import create_app
from .service.config import ServiceConfig


def build_parser() -> argparse.ArgumentParser:
    defaults = ServiceConfig.from_env()
    parser = argparse.ArgumentParser(
        prog="mementoviz",
        description="Serve webpage-change summaries of archived pages.",
    )
    parser.add_argument("--host", default=defaults.host)
    parser.add_argument("--port", type=int, default=defaults.port)
    parser.add_argument("--cache-dir", type=Path, default=defaults.cache_dir)
    parser.add_argument("--user-agent", default=defaults.user_agent)
    parser.add_argument("--fetch-timeout", type=float, default=defaults.fetch_timeout)
    parser.add_argument(
        "--render-backend", choices=("stub", "cdp"), default=defaults.render_backend,
        help="stub renders deterministic placeholders; cdp drives a headless browser",
    )
    parser.add_argument("--cdp-endpoint", default=defaults.cdp_endpoint,
                        help="DevTools HTTP endpoint, e.g. http://127.0.0.1:9222")
    parser.add_argument("--render-workers", type=int, default=defaults.render_workers)
    parser.add_argument("--render-timeout", type=float, default=defaults.render_timeout)
    parser.add_argument("--base-settle-wait", type=float, default=defaults.base_settle_wait)
    parser.add_argument("--thumbnail-width", type=int, default=defaults.thumbnail_width)
    parser.add_argument("--raw-memento-urls", action="store_true",
                        default=defaults.raw_memento_urls,
                        help="render archives' raw (id_) URLs to skip replay banners")
    parser.add_argument("--job-ttl-seconds", type=float, default=defaults.job_ttl_seconds)
    parser.add_argument("--public-base-url", default=defaults.public_base_url,
                        help="absolute base URL used in embed codes")
    parser.add_argument("--frontend-dir", type=Path, default=defaults.frontend_dir,
                        help="static UI bundle to serve at /ui")
    parser.add_argument("--ia-timemap-template", default=defaults.ia_timemap_template)
    parser.add_argument("--ait-timemap-template", default=defaults.ait_timemap_template)
    parser.add_argument("--max-sample", type=int, default=defaults.sampling.max_sample)
    parser.add_argument("--partitions", type=int, default=defaults.sampling.partitions)
    parser.add_argument("--quota-per-partition", type=int,
                        default=defaults.sampling.quota_per_partition)
    parser.add_argument("--log-level", default="info")
    return parser


def config_from_args(args: argparse.Namespace) -> ServiceConfig:
    sampling = SamplingConfig(
        max_sample=args.max_sample,
        partitions=args.partitions,
        quota_per_partition=args.quota_per_partition,
    )
    return ServiceConfig(
        host=args.host,
        port=args.port,
        cache_dir=args.cache_dir,
        user_agent=args.user_agent,
        fetch_timeout=args.fetch_timeout,
        render_backend=args.render_backend,
        cdp_endpoint=args.cdp_endpoint,
        render_workers=args.render_workers,
        render_timeout=args.render_timeout,
        base_settle_wait=args.base_settle_wait,
        thumbnail_width=args.thumbnail_width,
        raw_memento_urls=args.raw_memento_urls,
        job_ttl_seconds=args.job_ttl_seconds,
        public_base_url=args.public_base_url,
        frontend_dir=args.frontend_dir,
        ia_timemap_template=args.ia_timemap_template,
        ait_timemap_template=args.ait_timemap_template,
        sampling=sampling,
    )


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper())
    config = config_from_args(args)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level=args.log_level)


if __name__ == "__main__":
    main()

from .app import create_app, default_deps
from .config import ServiceConfig
from .jobs import JobState, JobStore, PipelineDeps, SummaryJob

__all__ = [
    "JobState",
    "JobStore",
    "PipelineDeps",
    "ServiceConfig",
    "SummaryJob",
    "create_app",
    "default_deps",
]

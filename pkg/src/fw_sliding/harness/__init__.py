"""Benchmark harness: run configs, suites and oracle checks from the command line."""

from .config import ConfigError, RunConfig, load_run_config, parse_run_config
from .runner import execute, run_suite, trace_csv_text

__all__ = ["ConfigError", "RunConfig", "execute", "load_run_config", "parse_run_config",
           "run_suite", "trace_csv_text"]

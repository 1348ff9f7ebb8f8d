"""Benchmark harness: task streams, domain mutations, experiment runs and reports."""

from .experiment import Manifest, adaptive_delay, build_stream, mean_delays, parse_manifest, run_experiment, run_one
from .mutate import Edit, MutationSpec, literal_diff, mutate_chain, mutate_domain
from .report import aggregate, delays, load_runs, summary, write_outputs
from .tasks import generate_tasks

__all__ = [
    "Edit", "Manifest", "MutationSpec", "adaptive_delay", "aggregate", "build_stream", "generate_tasks",
    "delays", "literal_diff", "load_runs", "mean_delays", "mutate_chain", "mutate_domain", "parse_manifest", "run_experiment",
    "run_one", "summary", "write_outputs",
]

"""Python bindings for the pqlab simulation and audit core."""

import json

from ._pqlab import (
    CapExceeded,
    InvariantBreach,
    ValidationError,
    __version__,
    answer_distribution,
    approximates,
    binary_entropy,
    build_matching,
    give_up_probability,
    is_prime,
    kl_divergence,
    mutual_information,
    relation_of,
    valid_answer,
)
from . import _pqlab

__all__ = [
    "CapExceeded",
    "InvariantBreach",
    "ValidationError",
    "__version__",
    "answer_distribution",
    "approximates",
    "binary_entropy",
    "build_matching",
    "counting_audit",
    "execute",
    "give_up_probability",
    "is_prime",
    "kl_divergence",
    "min_cover",
    "mutual_information",
    "one_way_cost",
    "relation_of",
    "run_config",
    "run_trials",
    "valid_answer",
    "verify",
]


def run_trials(N, k, trials, seed=0, policy="all-queries", exact=False, threads=1):
    """Aggregate counts from the learner harness, as in a learn-sim summary."""
    return json.loads(_pqlab._run_trials(N, k, trials, seed, policy, exact, threads))


def min_cover(N, mode="exact"):
    return json.loads(_pqlab._cover(N, mode))


def counting_audit(N, hypothesis_index):
    """Audit of hypothesis number `hypothesis_index` against every class it approximates."""
    return json.loads(_pqlab._counting_audit(N, hypothesis_index))


def one_way_cost(problem, eps):
    """`problem` uses the config format: {"relation", "mu"} or {"inputs", "bob_inputs", "answers", "valid", "mu"}."""
    return json.loads(_pqlab._one_way_cost(json.dumps(problem), eps))


def execute(config, seed=None, threads=1):
    """Runs a config dict in memory. Returns (summary dict, csv text)."""
    summary, csv = _pqlab._execute(json.dumps(config), seed, threads)
    return json.loads(summary), csv


def run_config(config, seed=None, out=None):
    """Like `pqlab run`: writes files and returns (exit status, log)."""
    return _pqlab._run_config(json.dumps(config), seed, None if out is None else str(out))


def verify(summary):
    passed, failed = _pqlab._verify(json.dumps(summary))
    return {"passed": passed, "failed": failed}

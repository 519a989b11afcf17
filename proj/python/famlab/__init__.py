"""Exact experiments on finitely additive measures."""

import json

from ._core import (
    FamlabError,
    binomial,
    generated_atoms,
    paper_parameters,
    run_suite,
    sandwich,
    suite_names,
)
from ._core import run_spec as _run_spec
from ._core import verify as _verify

__all__ = [
    "FamlabError",
    "binomial",
    "generated_atoms",
    "paper_parameters",
    "run",
    "run_suite",
    "sandwich",
    "suite_names",
    "verify",
]


def _decode(out):
    out = dict(out)
    out["report"] = json.loads(out["report"])
    return out


def run(spec, base=".", seed=None, budget=None, threads=None):
    """Run an experiment spec given as a dict or JSON text."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    return _decode(_run_spec(text, str(base), seed, budget, threads))


def verify(certificate):
    """Re-check a certificate document from a fam-limit run."""
    text = certificate if isinstance(certificate, str) else json.dumps(certificate)
    return _decode(_verify(text))

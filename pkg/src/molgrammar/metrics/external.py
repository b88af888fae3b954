"""Subprocess adapter for external per-molecule scorers.

The child reads one SMILES per line on stdin until EOF and must print
one decimal score per line, in order, then exit with status 0.
"""
from __future__ import annotations

import math
import shlex
import subprocess
from typing import Sequence

from ..errors import ProcessFailure, ProtocolError, ScorerTimeout
from ..molgraph import MolGraph, canonical_key

DEFAULT_TIMEOUT = 300.0


def external_metric(mols: Sequence, command, timeout: float = DEFAULT_TIMEOUT):
    """Score molecules with an external command; returns ``(scores, mean)``."""
    argv = shlex.split(command) if isinstance(command, str) else list(command)
    if not argv:
        raise ValueError("empty scorer command")
    lines = [canonical_key(m) if isinstance(m, MolGraph) else str(m) for m in mols]
    payload = "".join(s + "\n" for s in lines)
    try:
        proc = subprocess.run(argv, input=payload, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired as exc:
        raise ScorerTimeout(f"scorer {argv[0]!r} exceeded {timeout} s") from exc
    except OSError as exc:
        raise ProcessFailure(f"could not start scorer {argv[0]!r}: {exc}") from exc
    if proc.returncode != 0:
        raise ProcessFailure(
            f"scorer {argv[0]!r} exited with status {proc.returncode}: {proc.stderr.strip()[:500]}")
    out = [ln.strip() for ln in proc.stdout.splitlines() if ln.strip()]
    if len(out) != len(lines):
        raise ProtocolError(f"scorer returned {len(out)} scores for {len(lines)} molecules")
    scores = []
    for i, text in enumerate(out):
        try:
            v = float(text)
        except ValueError:
            raise ProtocolError(f"line {i + 1}: {text!r} is not a number") from None
        if not math.isfinite(v):
            raise ProtocolError(f"line {i + 1}: non-finite score {text!r}")
        scores.append(v)
    mean = sum(scores) / len(scores) if scores else float("nan")
    return scores, mean

"""Arc-search interior-point solver for smooth constrained NLPs.

    >>> import arcsearch
    >>> r = arcsearch.solve("HS19")
    >>> r.status, round(r.objective, 3)
    ('Converged', -6961.814)
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

# Installed wheels carry the .nlp formulations next to the package.
_bundled = Path(__file__).with_name("data")
if _bundled.is_dir() and not os.environ.get("ARCSEARCH_DATA_DIR"):
    os.environ["ARCSEARCH_DATA_DIR"] = str(_bundled)

from . import _arcsearch as _core  # noqa: E402
from ._arcsearch import (  # noqa: E402,F401
    ArcsearchError,
    EvaluationError,
    FactorizationError,
    InitializationError,
    ParseError,
    ProblemNotFound,
    StepStallError,
)

__all__ = [
    "Result",
    "solve",
    "trace",
    "bench",
    "bench_csv",
    "check_derivatives",
    "problem",
    "problem_names",
    "subset_names",
    "default_config",
    "ArcsearchError",
    "EvaluationError",
    "FactorizationError",
    "InitializationError",
    "ParseError",
    "ProblemNotFound",
    "StepStallError",
]


def _num(v: Any) -> float:
    return float(v) if isinstance(v, str) else v


@dataclass
class Result:
    problem: str
    status: str
    objective: float
    iterations: int
    seconds: float
    conv_phi: float
    x: np.ndarray
    message: str
    config: dict
    trace: list = field(repr=False)

    @property
    def converged(self) -> bool:
        return self.status == "Converged"

    @classmethod
    def from_json(cls, text: str) -> "Result":
        d = json.loads(text)
        return cls(
            problem=d["problem"],
            status=d["status"],
            objective=_num(d["objective"]),
            iterations=d["iterations"],
            seconds=_num(d["seconds"]),
            conv_phi=_num(d["conv_phi"]),
            x=np.array([_num(v) for v in d["x"]]),
            message=d["message"],
            config=d["config"],
            trace=d["trace"],
        )


def _config(config: dict | None, kwargs: dict) -> str:
    merged = dict(config or {})
    merged.update(kwargs)
    return json.dumps(merged)


def _vec(x: Sequence[float] | None) -> np.ndarray | None:
    return None if x is None else np.asarray(x, dtype=float)


def solve(problem: str, x0: Sequence[float] | None = None, config: dict | None = None,
          **kwargs: Any) -> Result:
    """Solve a library problem (or .nlp file) from `x0`, default the interior start.

    Config keys match the CLI's JSON config, e.g. ``variant=2, epsilon=1e-10,
    rhs_mode="naive", regularization={"curvature_correction": False}``.
    """
    return Result.from_json(_core.solve(problem, _vec(x0), _config(config, kwargs)))


def trace(problem: str, x0: Sequence[float] | None = None, samples: int = 50,
          config: dict | None = None, **kwargs: Any) -> tuple[np.ndarray, Result]:
    """Arc samples as rows (iter, alpha, x1..xn, phi), plus the final result."""
    rows, text = _core.trace(problem, _vec(x0), _config(config, kwargs), samples)
    return rows, Result.from_json(text)


def bench(set: str = "hs-subset", configs: Sequence[dict] | None = None,
          jobs: int = 1) -> list[dict]:
    text = _core.bench(set, [json.dumps(c) for c in configs or []], jobs, False)
    return json.loads(text)["rows"]


def bench_csv(set: str = "hs-subset", configs: Sequence[dict] | None = None,
              jobs: int = 1) -> str:
    return _core.bench(set, [json.dumps(c) for c in configs or []], jobs, True)


def check_derivatives(problem: str, x: Sequence[float] | None = None, tol: float = 1e-5,
                      tol_third: float = 1e-4) -> tuple[bool, list[dict]]:
    return _core.check_derivatives(problem, _vec(x), tol, tol_third)


def problem(name: str) -> dict:
    return _core.problem_info(name)


def problem_names() -> list[str]:
    return _core.problem_names()


def subset_names() -> list[str]:
    return _core.subset_names()


def default_config() -> dict:
    return json.loads(_core.default_config())

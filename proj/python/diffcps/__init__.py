"""Python bindings for the diffcps core.

Arrays use one sample per row. Training and data generation go through the
same code path as the ``diffcps`` command-line tool.
"""

import csv
import math
import os

from ._diffcps import (
    dual_step,
    jaccard_score,
    load_actions,
    noisy_circle_actions,
    posterior_mean,
    q_sample,
    radial_stats,
    run_cli,
    sample_policy,
    score_samples,
    vp_schedule,
)

__all__ = [
    "CliError",
    "dual_step",
    "gen_data",
    "jaccard_score",
    "load_actions",
    "noisy_circle_actions",
    "posterior_mean",
    "q_sample",
    "radial_stats",
    "read_metrics",
    "run_cli",
    "sample_policy",
    "score_samples",
    "train",
    "vp_schedule",
]


class CliError(RuntimeError):
    def __init__(self, code, stderr):
        super().__init__(f"diffcps exited with status {code}: {stderr.strip()}")
        self.code = code
        self.stderr = stderr


def _check(args):
    code, out, err = run_cli([str(a) for a in args])
    if code != 0:
        raise CliError(code, err)
    return out


def _flag_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def gen_data(out, n=5000, sigma=0.05, seed=0):
    """Writes the noisy-circle dataset to ``out`` and returns the path."""
    _check(["gen-data", "--n", n, "--sigma", repr(float(sigma)), "--seed", seed, "--out", out])
    return out


def read_metrics(path):
    """Rows of a metrics CSV as dicts of floats (``step`` as int)."""
    rows = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            rows.append({k: int(v) if k == "step" else float(v) for k, v in row.items()})
    return rows


def train(data, out, algo="diffcps", **config):
    """Trains ``algo`` on the dataset file ``data`` into directory ``out``.

    Keyword arguments are config keys (``steps``, ``T``, ``kappa``, ...).
    Returns the metrics rows; ``out`` also holds checkpoint.ckpt and config.txt.
    """
    args = ["train", "--algo", algo, "--data", data, "--out", out]
    for key, value in config.items():
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"{key} must be finite")
        args += [f"--{key}", _flag_value(value)]
    _check(args)
    return read_metrics(os.path.join(out, "metrics.csv"))

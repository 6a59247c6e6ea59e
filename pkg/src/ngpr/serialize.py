"""CSV and dotted-key text formats used by the command-line pipeline.

All floats are written with ``repr`` so files round-trip bit for bit, and
row orders are deterministic.  The dotted-key format is one ``key = value``
pair per line, ``#`` comments, values kept verbatim as strings.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence

import numpy as np

from .datagen import GenSpec, SyntheticDataset
from .kernels import KernelSpec
from .levy import JumpSet, LevyMeasureSpec, SubordinatorPath


def _fmt(value: float) -> str:
    return repr(float(value))


# ---------------------------------------------------------------------------
# dotted-key config text
# ---------------------------------------------------------------------------

def parse_kv_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def format_kv_text(entries: dict[str, str]) -> str:
    lines = [f"{key} = {entries[key]}" for key in sorted(entries)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# jump / path CSV:  dim,position,magnitude[,sweep]
# ---------------------------------------------------------------------------

def path_rows(path: SubordinatorPath) -> list[tuple[int, float, float]]:
    """Rows (dim, position, magnitude) sorted by dimension then position."""
    rows = []
    for dim, js in enumerate(path.jump_sets):
        order = np.lexsort((js.magnitudes, js.positions))
        rows.extend((dim, js.positions[i], js.magnitudes[i]) for i in order)
    return rows


def write_jumps_csv(fp, path: SubordinatorPath) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(["dim", "position", "magnitude"])
    for dim, pos, mag in path_rows(path):
        writer.writerow([dim, _fmt(pos), _fmt(mag)])


def read_jumps_csv(fp, domains: Sequence[tuple[float, float]]) -> SubordinatorPath:
    reader = csv.reader(fp)
    header = next(reader)
    if header[:3] != ["dim", "position", "magnitude"]:
        raise ValueError(f"unexpected jump CSV header: {header}")
    per_dim: dict[int, list[tuple[float, float]]] = {k: [] for k in range(len(domains))}
    for row in reader:
        if not row:
            continue
        dim = int(row[0])
        if dim not in per_dim:
            raise ValueError(f"jump row references dimension {dim}, have {len(domains)}")
        per_dim[dim].append((float(row[1]), float(row[2])))
    jump_sets = []
    for k, dom in enumerate(domains):
        if per_dim[k]:
            pos, mag = map(np.asarray, zip(*per_dim[k]))
        else:
            pos, mag = np.empty(0), np.empty(0)
        jump_sets.append(JumpSet(pos, mag, dom))
    return SubordinatorPath(jump_sets)


def write_sampled_paths_csv(fp, paths: Iterable[SubordinatorPath],
                            sweeps: Iterable[int]) -> None:
    """Per-sample subordinator jumps with the sweep index that produced them."""
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(["dim", "position", "magnitude", "sweep"])
    for path, sweep in zip(paths, sweeps):
        for dim, pos, mag in path_rows(path):
            writer.writerow([dim, _fmt(pos), _fmt(mag), sweep])


def read_sampled_paths_csv(fp, domains: Sequence[tuple[float, float]]
                           ) -> list[tuple[int, SubordinatorPath]]:
    """Inverse of ``write_sampled_paths_csv``; returns (sweep, path) pairs."""
    reader = csv.reader(fp)
    header = next(reader)
    if header != ["dim", "position", "magnitude", "sweep"]:
        raise ValueError(f"unexpected sampled-path CSV header: {header}")
    grouped: dict[int, dict[int, list[tuple[float, float]]]] = {}
    for row in reader:
        if not row:
            continue
        dim, pos, mag, sweep = int(row[0]), float(row[1]), float(row[2]), int(row[3])
        grouped.setdefault(sweep, {k: [] for k in range(len(domains))})[dim].append((pos, mag))
    out = []
    for sweep in sorted(grouped):
        jump_sets = []
        for k, dom in enumerate(domains):
            pairs = grouped[sweep][k]
            if pairs:
                pos, mag = map(np.asarray, zip(*pairs))
            else:
                pos, mag = np.empty(0), np.empty(0)
            jump_sets.append(JumpSet(pos, mag, dom))
        out.append((sweep, SubordinatorPath(jump_sets)))
    return out


# ---------------------------------------------------------------------------
# dataset CSV:  x_0..x_{d-1},y,observed  + dotted-key metadata sidecar
# ---------------------------------------------------------------------------

def write_dataset_csv(fp, X: np.ndarray, y: np.ndarray, observed: np.ndarray) -> None:
    X = np.atleast_2d(X)
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow([f"x_{k}" for k in range(X.shape[1])] + ["y", "observed"])
    for i in range(X.shape[0]):
        writer.writerow([_fmt(v) for v in X[i]] + [_fmt(y[i]), int(observed[i])])


def read_dataset_csv(fp) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    reader = csv.reader(fp)
    header = next(reader)
    d = sum(1 for name in header if name.startswith("x_"))
    if d < 1 or header[:d] != [f"x_{k}" for k in range(d)] or header[d] != "y":
        raise ValueError(f"unexpected dataset CSV header: {header}")
    has_observed = "observed" in header
    xs, ys, obs = [], [], []
    for row in reader:
        if not row:
            continue
        xs.append([float(v) for v in row[:d]])
        ys.append(float(row[d]))
        obs.append(bool(int(row[d + 1])) if has_observed else True)
    return np.asarray(xs, dtype=float), np.asarray(ys), np.asarray(obs, dtype=bool)


def read_inputs_csv(fp) -> np.ndarray:
    """Read the ``x_*`` columns of a CSV (extra columns like y are ignored)."""
    reader = csv.reader(fp)
    header = next(reader)
    d = sum(1 for name in header if name.startswith("x_"))
    if d < 1 or header[:d] != [f"x_{k}" for k in range(d)]:
        raise ValueError(f"expected leading x_0..x_{{d-1}} columns, got header {header}")
    rows = [[float(v) for v in row[:d]] for row in reader if row]
    return np.asarray(rows, dtype=float).reshape(-1, d)


def genspec_to_kv(spec: GenSpec) -> dict[str, str]:
    kv = {
        "gen.domain": format_domains(spec.domains),
        "gen.n_points": str(spec.n_points),
        "gen.n_observed": str(spec.n_observed),
        "gen.noise_std": _fmt(spec.noise_std),
        "gen.seed": str(spec.seed),
        "gen.grid": spec.grid,
        "kernel.family": spec.kernel.family,
        "kernel.length_scale": _fmt(spec.kernel.length_scale),
        "kernel.signal_variance": _fmt(spec.kernel.signal_variance),
        "kernel.jitter": _fmt(spec.kernel.jitter),
    }
    if spec.levy is None:
        kv["levy.family"] = "identity"
    else:
        kv.update({
            "levy.family": spec.levy.family,
            "levy.c": _fmt(spec.levy.C),
            "levy.alpha": _fmt(spec.levy.alpha),
            "levy.beta": _fmt(spec.levy.beta),
            "levy.n_terms": str(spec.levy.n_terms),
        })
    return kv


def genspec_from_kv(kv: dict[str, str]) -> GenSpec:
    kernel = KernelSpec(
        family=kv["kernel.family"],
        length_scale=float(kv["kernel.length_scale"]),
        signal_variance=float(kv["kernel.signal_variance"]),
        jitter=float(kv["kernel.jitter"]),
    )
    if kv["levy.family"] == "identity":
        levy = None
    else:
        levy = LevyMeasureSpec(
            family=kv["levy.family"],
            C=float(kv["levy.c"]),
            alpha=float(kv.get("levy.alpha", "0.5")),
            beta=float(kv.get("levy.beta", "1.0")),
            n_terms=int(kv["levy.n_terms"]),
        )
    return GenSpec(
        domains=parse_domains(kv["gen.domain"]),
        n_points=int(kv["gen.n_points"]),
        n_observed=int(kv["gen.n_observed"]),
        kernel=kernel,
        levy=levy,
        noise_std=float(kv["gen.noise_std"]),
        seed=int(kv["gen.seed"]),
        grid=kv["gen.grid"],
    )


def parse_domains(text: str) -> tuple[tuple[float, float], ...]:
    """Parse ``lo,hi`` pairs separated by ``;`` into per-dimension intervals."""
    domains = []
    for part in text.split(";"):
        pieces = part.split(",")
        if len(pieces) != 2:
            raise ValueError(f"expected 'lo,hi' in domain spec, got {part!r}")
        domains.append((float(pieces[0]), float(pieces[1])))
    return tuple(domains)


def format_domains(domains: Sequence[tuple[float, float]]) -> str:
    return ";".join(f"{_fmt(lo)},{_fmt(hi)}" for lo, hi in domains)


# ---------------------------------------------------------------------------
# posterior / prediction CSV:  x...,posterior_mean,posterior_std,predictive_std
# ---------------------------------------------------------------------------

def write_posterior_csv(fp, X: np.ndarray, mean: np.ndarray, post_std: np.ndarray,
                        pred_std: np.ndarray) -> None:
    X = np.atleast_2d(X)
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow([f"x_{k}" for k in range(X.shape[1])]
                    + ["posterior_mean", "posterior_std", "predictive_std"])
    for i in range(X.shape[0]):
        writer.writerow([_fmt(v) for v in X[i]]
                        + [_fmt(mean[i]), _fmt(post_std[i]), _fmt(pred_std[i])])


def read_posterior_csv(fp) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    reader = csv.reader(fp)
    header = next(reader)
    d = sum(1 for name in header if name.startswith("x_"))
    expected = [f"x_{k}" for k in range(d)] + ["posterior_mean", "posterior_std",
                                               "predictive_std"]
    if header != expected:
        raise ValueError(f"unexpected posterior CSV header: {header}")
    rows = [[float(v) for v in row] for row in reader if row]
    arr = np.asarray(rows, dtype=float).reshape(-1, d + 3)
    return arr[:, :d], arr[:, d], arr[:, d + 1], arr[:, d + 2]


# ---------------------------------------------------------------------------
# trace CSV:  sweep,log_cond_lik,accepted
# ---------------------------------------------------------------------------

def write_trace_csv(fp, trace) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(["sweep", "log_cond_lik", "accepted"])
    for step in trace:
        writer.writerow([step.sweep, _fmt(step.log_cond_lik), int(step.accepted)])


def dataset_to_string(data: SyntheticDataset) -> str:
    buf = io.StringIO()
    write_dataset_csv(buf, data.X, data.y, data.observed)
    return buf.getvalue()

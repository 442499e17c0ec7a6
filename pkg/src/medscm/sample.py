"""Seeded i.i.d. sampling, empirical laws, and plug-in estimation.

All randomness flows through counter-based Philox streams keyed by explicit
seeds (and, for the bootstrap, the replicate index), so identical inputs give
identical outputs regardless of execution order or parallelism. Datasets
interchange as plain integer CSV.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
from dataclasses import dataclass

import numpy as np

from . import identify
from .engine import ObservedLaw
from .errors import DomainError
from .model import Scm, scm_to_json


@dataclass(frozen=True)
class Dataset:
    """Sampled rows in canonical column order (covariates..., A, [L,] M, Y)."""

    columns: tuple[str, ...]
    rows: np.ndarray
    provenance: tuple[str, int, int]  # (model id, n, seed)

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])


@dataclass(frozen=True)
class Estimate:
    """A plug-in estimate with a percentile bootstrap interval (level 0.95);
    the interval is absent when n_boot is zero."""

    estimand: str
    value: float
    ci_low: float | None
    ci_high: float | None
    n_boot: int


def scm_id(scm: Scm) -> str:
    return hashlib.sha256(scm_to_json(scm).encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _canonical_columns(scm: Scm) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(variable names in draw order, canonical CSV header names)."""
    order = scm.topo_order
    header = []
    for name in order:
        role = scm.var(name).role
        header.append(name if role == "C" else role)
    if len(set(header)) != len(header):
        raise DomainError(
            "covariate names collide with the canonical A/L/M/Y column names"
        )
    return order, tuple(header)


def draw_samples(scm: Scm, n: int, seed: int) -> Dataset:
    """Draw n i.i.d. rows from the observational law.

    Row k consumes the k-th block of a Philox counter-based stream keyed by
    seed, so the output is reproducible and independent of any chunking.
    """
    if not isinstance(scm, Scm):
        raise DomainError("sampling requires a structural-table model")
    if n < 0:
        raise DomainError("n must be nonnegative")
    order, header = _canonical_columns(scm)
    gen = np.random.Generator(np.random.Philox(key=seed))
    uniforms = gen.random((n, len(order)))
    columns: dict[str, np.ndarray] = {}
    for j, name in enumerate(order):
        table = scm.table_for(name)
        noise = scm.noise_for(name)
        levels = noise.levels()
        cum = np.cumsum([noise.pmf[lv] for lv in levels])
        cum[-1] = 1.0
        e_idx = np.searchsorted(cum, uniforms[:, j], side="right")
        e_idx = np.minimum(e_idx, len(levels) - 1)
        # mixed-radix index over (parent supports..., noise levels)
        parent_supports = [sorted(scm.var(p).support) for p in table.parents]
        flat = np.zeros(n, dtype=np.int64)
        for p, sup in zip(table.parents, parent_supports):
            pos = np.searchsorted(np.asarray(sup), columns[p])
            flat = flat * len(sup) + pos
        flat = flat * len(levels) + e_idx
        lookup = np.empty(
            int(np.prod([len(s) for s in parent_supports] + [len(levels)])), dtype=np.int64
        )
        for idx, pv in enumerate(itertools.product(*parent_supports)):
            base = idx * len(levels)
            for k, lv in enumerate(levels):
                lookup[base + k] = table.value(tuple(pv), lv)
        columns[name] = lookup[flat]
    rows = (
        np.column_stack([columns[name] for name in order]).astype(np.int64)
        if n > 0
        else np.zeros((0, len(order)), dtype=np.int64)
    )
    return Dataset(header, rows, (scm_id(scm), n, seed))


# ---------------------------------------------------------------------------
# Empirical laws
# ---------------------------------------------------------------------------


def _column_roles(columns: tuple[str, ...]) -> tuple[list[int], int, int | None, int, int]:
    names = list(columns)
    for required in ("A", "M", "Y"):
        if required not in names:
            raise DomainError(f"dataset is missing required column {required}")
    c_idx = [i for i, c in enumerate(names) if c not in ("A", "L", "M", "Y")]
    l_idx = names.index("L") if "L" in names else None
    return c_idx, names.index("A"), l_idx, names.index("M"), names.index("Y")


def empirical_law(
    ds: Dataset, exposure_levels: tuple[int, int] | None = None
) -> ObservedLaw:
    """Empirical pmf of a dataset; supports are the observed value sets, and
    a required cell that happens to be empty in-sample surfaces later as a
    degenerate-stratum error from whichever functional needs it."""
    if ds.n == 0:
        raise DomainError("cannot build an empirical law from an empty dataset")
    c_idx, a_idx, l_idx, m_idx, y_idx = _column_roles(ds.columns)
    cells, counts = np.unique(ds.rows, axis=0, return_counts=True)
    pmf: dict[tuple, float] = {}
    for cell, count in zip(cells, counts):
        key = (
            tuple(int(cell[i]) for i in c_idx),
            int(cell[a_idx]),
            int(cell[l_idx]) if l_idx is not None else None,
            int(cell[m_idx]),
            int(cell[y_idx]),
        )
        pmf[key] = pmf.get(key, 0.0) + count / ds.n
    a_support = tuple(sorted({int(v) for v in ds.rows[:, a_idx]}))
    if exposure_levels is None:
        if len(a_support) < 2:
            raise DomainError("exposure takes a single value in-sample; specify exposure_levels")
        exposure_levels = (a_support[0], a_support[-1])
    return ObservedLaw(
        pmf=pmf,
        c_names=tuple(ds.columns[i] for i in c_idx),
        c_supports=tuple(
            tuple(sorted({int(v) for v in ds.rows[:, i]})) for i in c_idx
        ),
        a_support=a_support,
        l_support=(
            tuple(sorted({int(v) for v in ds.rows[:, l_idx]})) if l_idx is not None else None
        ),
        m_support=tuple(sorted({int(v) for v in ds.rows[:, m_idx]})),
        y_support=tuple(sorted({int(v) for v in ds.rows[:, y_idx]})),
        exposure_levels=exposure_levels,
    )


# ---------------------------------------------------------------------------
# Plug-in estimation with percentile bootstrap
# ---------------------------------------------------------------------------

_PARAMETRIC = {"psi_cde", "psi_pe"}


def _apply_functional(law: ObservedLaw, estimand: str, m: int | None) -> float:
    if estimand not in identify.FUNCTIONALS:
        raise DomainError(
            f"unknown estimand {estimand!r}; expected one of {sorted(identify.FUNCTIONALS)}"
        )
    fn = identify.FUNCTIONALS[estimand]
    if estimand in _PARAMETRIC:
        if m is None:
            raise DomainError(f"estimand {estimand} requires a mediator level m")
        return fn(law, m)
    return fn(law)


def _law_from_cells(
    template: ObservedLaw, keys: list[tuple], weights: np.ndarray
) -> ObservedLaw:
    total = weights.sum()
    pmf = {
        key: w / total for key, w in zip(keys, weights.tolist()) if w > 0
    }
    return ObservedLaw(
        pmf=pmf,
        c_names=template.c_names,
        c_supports=template.c_supports,
        a_support=template.a_support,
        l_support=template.l_support,
        m_support=template.m_support,
        y_support=template.y_support,
        exposure_levels=template.exposure_levels,
    )


def estimate(
    ds: Dataset,
    estimand: str,
    n_boot: int = 1000,
    seed: int = 0,
    *,
    m: int | None = None,
    exposure_levels: tuple[int, int] | None = None,
) -> Estimate:
    """Plug-in estimate of an identification functional with a seeded,
    counter-based nonparametric bootstrap (rows resampled with replacement;
    replicate r draws from a Philox stream keyed by (seed, r))."""
    law = empirical_law(ds, exposure_levels)
    value = _apply_functional(law, estimand, m)
    label = f"{estimand}({m})" if estimand in _PARAMETRIC else estimand
    if n_boot == 0:
        return Estimate(label, value, None, None, 0)

    c_idx, a_idx, l_idx, m_idx, y_idx = _column_roles(ds.columns)
    cells, inverse = np.unique(ds.rows, axis=0, return_inverse=True)
    keys = []
    for cell in cells:
        keys.append(
            (
                tuple(int(cell[i]) for i in c_idx),
                int(cell[a_idx]),
                int(cell[l_idx]) if l_idx is not None else None,
                int(cell[m_idx]),
                int(cell[y_idx]),
            )
        )
    n = ds.n
    values = np.empty(n_boot)
    for r in range(n_boot):
        gen = np.random.Generator(np.random.Philox(key=[seed, r]))
        draw = gen.integers(0, n, size=n)
        weights = np.bincount(inverse[draw], minlength=len(keys)).astype(float)
        boot_law = _law_from_cells(law, keys, weights)
        values[r] = _apply_functional(boot_law, estimand, m)
    lo, hi = np.quantile(values, [0.025, 0.975])
    if lo > hi:
        raise DomainError("bootstrap interval endpoints out of order")
    return Estimate(label, value, float(lo), float(hi), n_boot)


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------


def write_csv(ds: Dataset, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ds.columns)
        for row in ds.rows:
            writer.writerow([int(v) for v in row])


def read_csv(path: str, provenance: tuple[str, int, int] | None = None) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        rows = [[int(v) for v in row] for row in reader if row]
    arr = (
        np.array(rows, dtype=np.int64)
        if rows
        else np.zeros((0, len(header)), dtype=np.int64)
    )
    return Dataset(header, arr, provenance or ("file", arr.shape[0], -1))

"""Benchmark harness: generate instances, factorize both ways, report nnz(L).

``nnz_bbk`` is the whole-matrix bounded Bunch-Kaufman baseline from this
package; it is not MA57.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import re
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import FactorizationError, InvariantViolation
from .factor import factorize_block_kkt, factorize_dense_bbk
from .generate import GenSpec, generate
from .model import assemble_kkt, build_rhs
from .pattern import predict_nnz_dense_h
from .solve import kkt_residual, solve_with_factorization

log = logging.getLogger(__name__)

__all__ = [
    "CSV_COLUMNS",
    "BenchRow",
    "NnzReport",
    "PRESETS",
    "format_blocks",
    "load_config",
    "parse_blocks",
    "run_bench",
    "write_csv",
]

CSV_COLUMNS = (
    "n",
    "block_spec",
    "density",
    "instances",
    "seed",
    "nnz_ours",
    "nnz_bbk",
    "predicted_nnz",
    "fill_structured",
    "time_factor_ms",
    "time_solve_ms",
    "residual",
)

MAX_RETRIES = 5
# generator seed for instance i, retry r: seed + i * SEED_STRIDE + r
SEED_STRIDE = 1000

_PAIR = re.compile(r"^\s*(\d+)\s*[x×]\s*(\d+)\s*$")
_SPEC = re.compile(r"^\s*(\d+)\s*[x×]\s*\((.*)\)\s*$")


def parse_blocks(text: str) -> tuple[tuple[int, int], ...]:
    """Parse ``"10x(50x10)"`` or ``"5x(50x10,75x15,...)"`` into (n_i, m_i) pairs.

    A single pair inside the parentheses is repeated ``N`` times; otherwise
    exactly ``N`` pairs are required.
    """
    match = _SPEC.match(text)
    if not match:
        raise ValueError(f"bad block spec {text!r}; expected e.g. 10x(50x10)")
    count = int(match.group(1))
    pairs = []
    for part in match.group(2).split(","):
        pm = _PAIR.match(part)
        if not pm:
            raise ValueError(f"bad block {part!r} in {text!r}")
        pairs.append((int(pm.group(1)), int(pm.group(2))))
    if count < 1:
        raise ValueError("block count must be positive")
    if len(pairs) == 1:
        return tuple(pairs * count)
    if len(pairs) != count:
        raise ValueError(f"{text!r} declares {count} blocks but lists {len(pairs)}")
    return tuple(pairs)


def format_blocks(block_dims: Sequence[tuple[int, int]]) -> str:
    dims = [tuple(d) for d in block_dims]
    if all(d == dims[0] for d in dims):
        return f"{len(dims)}x({dims[0][0]}x{dims[0][1]})"
    return f"{len(dims)}x(" + ",".join(f"{a}x{b}" for a, b in dims) + ")"


@dataclass(frozen=True)
class BenchRow:
    n: int
    block_dims: tuple[tuple[int, int], ...]
    density: float = 1.0
    instances: int = 10
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "block_dims", tuple(tuple(map(int, d)) for d in self.block_dims))
        if self.instances < 1:
            raise InvariantViolation("instances >= 1")
        GenSpec(self.n, self.block_dims, self.density, self.seed)  # validates

    @property
    def block_spec(self) -> str:
        return format_blocks(self.block_dims)


@dataclass
class NnzReport:
    n: int
    block_spec: str
    density: float
    instance_count: int
    seed: int
    nnz_ours: float | None = None
    nnz_bbk: float | None = None
    predicted_nnz: int | None = None
    fill_structured: int = 0
    time_factor_ms: float | None = None
    time_solve_ms: float | None = None
    residual: float | None = None
    flops_ours: float | None = None
    flops_bbk: float | None = None
    max_dense_multiplier: float = 0.0
    retries: int = 0
    errors: list[str] = field(default_factory=list)

    def csv_row(self) -> dict:
        def num(v):
            return "" if v is None else repr(v)

        return {
            "n": self.n,
            "block_spec": self.block_spec,
            "density": repr(float(self.density)),
            "instances": self.instance_count,
            "seed": self.seed,
            "nnz_ours": num(self.nnz_ours),
            "nnz_bbk": num(self.nnz_bbk),
            "predicted_nnz": num(self.predicted_nnz),
            "fill_structured": self.fill_structured,
            "time_factor_ms": num(self.time_factor_ms),
            "time_solve_ms": num(self.time_solve_ms),
            "residual": num(self.residual),
        }


def _mean(values: list) -> float | None:
    return float(np.mean(values)) if values else None


def run_row(row: BenchRow, baseline: bool = True) -> NnzReport:
    report = NnzReport(row.n, row.block_spec, row.density, 0, row.seed)
    if row.density >= 1.0:
        report.predicted_nnz = predict_nnz_dense_h(row.n, row.block_dims)
    nnz_ours, nnz_bbk, flops_ours, flops_bbk = [], [], [], []
    t_fact, t_solve, residuals = [], [], []

    for i in range(row.instances):
        for retry in range(MAX_RETRIES + 1):
            gseed = row.seed + i * SEED_STRIDE + retry
            problem = generate(GenSpec(row.n, row.block_dims, row.density, gseed))
            K = assemble_kkt(problem)
            v = build_rhs(problem, np.zeros(row.n)).v
            try:
                t0 = time.perf_counter()
                f = factorize_block_kkt(K, seed=gseed)
                t1 = time.perf_counter()
                z = solve_with_factorization(f, v)
                t2 = time.perf_counter()
            except FactorizationError as exc:
                report.retries += 1
                log.info("instance %d seed %d: %s; retrying", i, gseed, exc)
                continue
            break
        else:
            report.errors.append(f"instance {i}: no nonsingular instance after {MAX_RETRIES} retries")
            continue

        report.instance_count += 1
        nnz_ours.append(f.nnz())
        flops_ours.append(f.solve_flops())
        report.fill_structured += f.structured_fill()
        report.max_dense_multiplier = max(report.max_dense_multiplier, f.max_multiplier())
        t_fact.append((t1 - t0) * 1e3)
        t_solve.append((t2 - t1) * 1e3)
        residuals.append(kkt_residual(K, z, v))
        if baseline:
            try:
                g = factorize_dense_bbk(K)
            except FactorizationError as exc:
                report.errors.append(f"instance {i}: baseline failed: {exc}")
            else:
                nnz_bbk.append(g.nnz())
                flops_bbk.append(g.solve_flops())

    report.nnz_ours = _mean(nnz_ours)
    report.nnz_bbk = _mean(nnz_bbk)
    report.flops_ours = _mean(flops_ours)
    report.flops_bbk = _mean(flops_bbk)
    report.time_factor_ms = _mean(t_fact)
    report.time_solve_ms = _mean(t_solve)
    report.residual = _mean(residuals)
    return report


def run_bench(rows: Iterable[BenchRow], baseline: bool = True) -> list[NnzReport]:
    """One report per row; per-instance failures are kept in ``report.errors``."""
    reports = []
    for row in rows:
        log.info("n=%d %s density=%g", row.n, row.block_spec, row.density)
        reports.append(run_row(row, baseline))
    return reports


def write_csv(reports: Iterable[NnzReport], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for rep in reports:
            writer.writerow(rep.csv_row())


# -- reference benchmark configurations ------------------------------------

def _rows(specs, density=1.0):
    return [(n, parse_blocks(b), density) for n, b in specs]


TABLE1 = _rows([
    (500, "10x(50x10)"), (500, "10x(50x40)"), (500, "20x(25x5)"),
    (500, "20x(25x20)"), (500, "50x(10x2)"), (500, "50x(10x8)"),
    (1000, "10x(100x20)"), (1000, "10x(100x80)"), (1000, "20x(50x10)"),
    (1000, "20x(50x40)"), (1000, "50x(20x4)"), (1000, "50x(20x16)"),
    (1500, "10x(150x30)"), (1500, "10x(150x120)"), (1500, "20x(75x15)"),
    (1500, "20x(75x60)"), (1500, "50x(30x6)"), (1500, "50x(30x24)"),
])

TABLE3 = _rows([
    (500, "5x(50x10,75x15,100x20,125x25,150x30)"),
    (500, "5x(50x40,75x60,100x80,125x100,150x120)"),
    (1000, "5x(100x20,150x30,200x40,250x50,300x60)"),
    (1000, "5x(100x80,150x120,200x160,250x200,300x240)"),
    (1500, "5x(150x30,225x45,300x60,375x75,450x90)"),
    (1500, "5x(150x120,225x180,300x240,375x300,450x360)"),
])

_TABLE2_BLOCKS = ["10x(100x20)", "10x(100x80)", "20x(50x10)", "20x(50x40)", "50x(20x4)", "50x(20x16)"]
TABLE2 = [row for d in (0.3, 0.5, 0.7) for row in _rows([(1000, b) for b in _TABLE2_BLOCKS], d)]

PRESETS = {"table1": TABLE1, "table2": TABLE2, "table3": TABLE3}


def preset_rows(name: str, instances: int = 10, seed: int = 0) -> list[BenchRow]:
    return [BenchRow(n, dims, d, instances, seed) for n, dims, d in PRESETS[name]]


def load_config(path: str | os.PathLike) -> tuple[list[BenchRow], bool]:
    """Read a JSON config.

    ``{"instances": 10, "seed": 0, "baseline": true,
       "rows": [{"vars": 500, "blocks": "10x(50x10)", "density": 1.0}, ...]}``

    Row-level ``instances``/``seed`` override the top-level values; a row may
    name a ``"preset"`` instead of ``vars``/``blocks``.
    """
    with open(path) as fh:
        cfg = json.load(fh)
    instances = int(cfg.get("instances", 10))
    seed = int(cfg.get("seed", 0))
    rows: list[BenchRow] = []
    for entry in cfg.get("rows", []):
        inst = int(entry.get("instances", instances))
        rseed = int(entry.get("seed", seed))
        if "preset" in entry:
            rows.extend(preset_rows(entry["preset"], inst, rseed))
            continue
        rows.append(
            BenchRow(int(entry["vars"]), parse_blocks(entry["blocks"]), float(entry.get("density", 1.0)), inst, rseed)
        )
    if not rows:
        raise ValueError("config defines no rows")
    return rows, bool(cfg.get("baseline", True))

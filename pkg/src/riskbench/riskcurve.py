"""Shared row format for excess-risk measurements and its CSV schema."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError

CSV_HEADER = ["dataset", "objective", "z", "j", "k", "n", "repeat", "seed",
              "sample_cost", "full_cost", "excess"]


@dataclass
class RiskRow:
    dataset: str
    objective: str
    z: int
    j: int
    k: int
    n: int
    repeat: int
    seed: int
    sample_cost: float
    full_cost: float
    excess: float

    def as_record(self) -> list[str]:
        return [self.dataset, self.objective, str(self.z), str(self.j),
                str(self.k), str(self.n), str(self.repeat), str(self.seed),
                _fmt(self.sample_cost), _fmt(self.full_cost), _fmt(self.excess)]


def _fmt(x: float) -> str:
    # repr round-trips float64 exactly and is stable across runs/platforms
    return repr(float(x))


def write_rows(path, rows: list[RiskRow]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.as_record())


def read_rows(path) -> list[RiskRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ParseError(f"unexpected CSV header {header!r}", line=1)
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(CSV_HEADER):
                raise ParseError(f"expected {len(CSV_HEADER)} fields, got {len(rec)}",
                                 line=lineno)
            try:
                rows.append(RiskRow(
                    dataset=rec[0], objective=rec[1], z=int(rec[2]), j=int(rec[3]),
                    k=int(rec[4]), n=int(rec[5]), repeat=int(rec[6]), seed=int(rec[7]),
                    sample_cost=float(rec[8]), full_cost=float(rec[9]),
                    excess=float(rec[10])))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
    return rows

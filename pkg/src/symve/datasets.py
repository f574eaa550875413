"""Bundled trial data."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

from .errors import DomainError
from .estimands import TwoArmCounts


@dataclass(frozen=True)
class TrialRecord:
    category: str
    x1: int
    n1: int
    x0: int
    n0: int
    # values as printed in the source table, for golden comparisons
    published: dict | None = None

    @property
    def counts(self) -> TwoArmCounts:
        return TwoArmCounts(self.x0, self.n0, self.x1, self.n1)


_PUBLISHED = ("ve", "ve_lower", "ve_upper", "sve", "sve_lower", "sve_upper")
DATASETS = {"vax004": "vax004.csv"}


def load_dataset(name: str) -> list[TrialRecord]:
    key = name.strip().lower()
    if key not in DATASETS:
        raise DomainError(f"unknown dataset {name!r}; available: {', '.join(sorted(DATASETS))}")
    text = resources.files("symve.data").joinpath(DATASETS[key]).read_text(encoding="utf-8")
    records = []
    for row in csv.DictReader(io.StringIO(text)):
        rec = TrialRecord(
            category=row["category"],
            x1=int(row["x1"]), n1=int(row["n1"]),
            x0=int(row["x0"]), n0=int(row["n0"]),
            published={k: float(row[k]) for k in _PUBLISHED},
        )
        rec.counts  # validates
        records.append(rec)
    return records


def load_vax004() -> list[TrialRecord]:
    return load_dataset("vax004")

"""Finite probability distributions over an ordered discrete support.

A :class:`Distribution` is an immutable probability vector with unique
support labels.  Inputs whose total mass deviates from 1 by at most
``MASS_TOL`` are renormalized; larger deviations are rejected so that
serialization rounding is tolerated without masking real bugs.

Serialization formats: JSON ``{"labels": [...], "probs": [...]}`` and CSV
with one ``label,prob`` line per symbol.  Probabilities are written with
``repr`` so round-trips preserve values exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from .errors import DistributionError, SupportMismatchError

MASS_TOL = 1e-9


@dataclass(frozen=True)
class Distribution:
    """A finite probability vector with ordered, unique support labels."""

    probs: tuple[float, ...]
    labels: tuple[Hashable, ...]
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        probs = tuple(float(x) for x in self.probs)
        labels = tuple(self.labels)
        if len(probs) == 0:
            raise DistributionError("empty support")
        if len(labels) != len(probs):
            raise DistributionError(
                f"{len(labels)} labels for {len(probs)} probabilities"
            )
        if len(set(labels)) != len(labels):
            raise DistributionError("support labels must be unique")
        if any(x < 0 or not math.isfinite(x) for x in probs):
            raise DistributionError("probabilities must be finite and nonnegative")
        total = math.fsum(probs)
        if abs(total - 1.0) > MASS_TOL:
            raise DistributionError(
                f"total mass {total!r} deviates from 1 by more than {MASS_TOL}"
            )
        if total != 1.0:
            probs = tuple(x / total for x in probs)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "labels", labels)
        arr = np.asarray(probs, dtype=np.float64)
        arr.flags.writeable = False
        object.__setattr__(self, "_array", arr)

    # -- basic accessors ---------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        """Read-only numpy view of the probability vector."""
        return self._array

    def __len__(self) -> int:
        return len(self.probs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_probs(
        cls, probs: Iterable[float], labels: Iterable[Hashable] | None = None
    ) -> "Distribution":
        probs = tuple(probs)
        if labels is None:
            labels = tuple(range(len(probs)))
        return cls(probs, tuple(labels))

    @classmethod
    def bernoulli(
        cls, bias: float, labels: tuple[Hashable, Hashable] = (0, 1)
    ) -> "Distribution":
        """Two-point distribution with ``P(labels[1]) = bias``."""
        if not 0.0 <= bias <= 1.0:
            raise DistributionError(f"Bernoulli bias {bias} outside [0, 1]")
        return cls((1.0 - bias, bias), labels)

    @classmethod
    def uniform(cls, k: int) -> "Distribution":
        return cls.from_probs([1.0 / k] * k)

    # -- structure ---------------------------------------------------------

    def aligned_with(self, other: "Distribution") -> None:
        """Raise unless both distributions share the same ordered support."""
        if self.labels != other.labels:
            raise SupportMismatchError(
                f"supports differ: {self.labels} vs {other.labels}"
            )

    def product(self, other: "Distribution") -> "Distribution":
        """Independent product on the cartesian support (row-major order)."""
        probs = np.multiply.outer(self._array, other.as_array()).ravel()
        labels = tuple((a, b) for a in self.labels for b in other.labels)
        return Distribution(tuple(probs), labels)

    def coarsen(self, mapping: Mapping[Hashable, Hashable]) -> "Distribution":
        """Push forward through a deterministic map of support labels."""
        out: dict[Hashable, float] = {}
        for lab, pr in zip(self.labels, self.probs):
            out[mapping[lab]] = out.get(mapping[lab], 0.0) + pr
        labels = tuple(out)
        return Distribution(tuple(out[lab] for lab in labels), labels)

    def restricted(self, predicate) -> float:
        """Total mass of labels satisfying ``predicate`` (test helper)."""
        return math.fsum(
            pr for lab, pr in zip(self.labels, self.probs) if predicate(lab)
        )

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"labels": list(self.labels), "probs": list(self.probs)})

    @classmethod
    def from_json(cls, text: str) -> "Distribution":
        try:
            obj = json.loads(text)
            return cls(tuple(obj["probs"]), tuple(obj["labels"]))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise DistributionError(f"malformed distribution JSON: {exc}") from exc

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        for lab, pr in zip(self.labels, self.probs):
            writer.writerow([lab, repr(pr)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Distribution":
        """Parse ``label,prob`` lines; integer-looking labels load as ints
        so CSV and JSON files describing the same support stay aligned."""
        labels: list[Hashable] = []
        probs: list[float] = []
        try:
            for row in csv.reader(io.StringIO(text)):
                if not row:
                    continue
                label: Hashable = row[0]
                try:
                    label = int(row[0])
                except ValueError:
                    pass
                labels.append(label)
                probs.append(float(row[1]))
        except (IndexError, ValueError) as exc:
            raise DistributionError(f"malformed distribution CSV: {exc}") from exc
        return cls(tuple(probs), tuple(labels))

    @classmethod
    def from_file(cls, path: str) -> "Distribution":
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        if path.endswith(".csv"):
            return cls.from_csv(text)
        return cls.from_json(text)


def aligned_arrays(p: Distribution, q: Distribution) -> tuple[np.ndarray, np.ndarray]:
    """Probability arrays of a pair after checking support alignment."""
    p.aligned_with(q)
    return p.as_array(), q.as_array()

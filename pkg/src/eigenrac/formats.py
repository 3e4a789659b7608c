"""File formats.

* A bare sequence is a JSON array of ``[re, im]`` pairs, or CSV with columns
  ``index,re,im``.
* A sequence file is a JSON object ``{"N": ..., "sequences": [record, ...]}``
  where each record carries ``lambda``, ``residual``, ``classification`` and
  ``entries``. Loading re-verifies every record. Signature pools use the same
  layout.
* A mapping matrix is ``{"k", "source_lambda", "N", "columns"}`` with each
  column a list of pairs.
* A link config is ``{"b", "E_max", "N", "selection", "pool_file"}``.

Floats are written with 17 significant digits, so every double round-trips.
"""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eigen import InvariantSequence, MappingMatrix, classify, residual
from .rac import EigenspaceSelection
from .sequence import RTOL, Eigenvalue, as_sequence
from .txrx import SignaturePool


def _f(v: float) -> float:
    # json writes repr(), which already round-trips; normalise -0.0 only
    return 0.0 if v == 0 else float(v)


def sequence_to_pairs(x) -> list[list[float]]:
    x = as_sequence(x)
    if x.ndim != 1:
        raise ValueError("expected a 1-D sequence")
    return [[_f(v.real), _f(v.imag)] for v in x]


def sequence_from_pairs(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2:
        raise ValueError("expected a list of [re, im] pairs")
    return as_sequence(a[:, 0] + 1j * a[:, 1])


def sequence_to_csv(x) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im"])
    for i, v in enumerate(as_sequence(x)):
        w.writerow([i, format(_f(v.real), ".17g"), format(_f(v.imag), ".17g")])
    return buf.getvalue()


def sequence_from_csv(text: str) -> np.ndarray:
    rows = list(csv.DictReader(_io.StringIO(text)))
    if not rows or not {"index", "re", "im"} <= set(rows[0]):
        raise ValueError("CSV must have columns index,re,im")
    n = len(rows)
    out = np.zeros(n, dtype=complex)
    seen = set()
    for r in rows:
        i = int(r["index"])
        if not 0 <= i < n or i in seen:
            raise ValueError(f"bad or duplicate index {i}")
        seen.add(i)
        out[i] = float(r["re"]) + 1j * float(r["im"])
    return as_sequence(out)


@dataclass
class SequenceRecord:
    """A sequence with its eigenvalue tag and free-form provenance."""

    seq: np.ndarray
    lam: Eigenvalue | None
    zero: bool = False
    provenance: dict | None = None

    @property
    def residual(self) -> float | None:
        return None if self.lam is None else residual(self.seq, self.lam)

    @property
    def classification(self) -> Eigenvalue | None:
        if not np.any(self.seq):
            return None
        return classify(self.seq)

    def to_json(self) -> dict:
        cls = self.classification
        res = self.residual
        d = {
            "lambda": None if self.lam is None else self.lam.value,
            "residual": None if res is None else _f(res),
            "classification": None if cls is None else cls.value,
            "zero": bool(self.zero),
        }
        if self.provenance:
            d["provenance"] = self.provenance
        d["entries"] = sequence_to_pairs(self.seq)
        return d

    @classmethod
    def from_invariant(cls, s: InvariantSequence, **provenance) -> "SequenceRecord":
        return cls(s.seq, s.lam, s.zero, provenance or None)

    def to_invariant(self) -> InvariantSequence:
        if self.lam is None:
            raise ValueError("record has no eigenvalue tag")
        return InvariantSequence(self.seq, self.lam, zero=self.zero)


def dumps_records(records, fmt: str = "json") -> str:
    records = list(records)
    if fmt == "json":
        n = records[0].seq.shape[0] if records else 0
        doc = {"N": n, "sequences": [r.to_json() for r in records]}
        return json.dumps(doc, indent=1) + "\n"
    if fmt == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seq", "lambda", "residual", "classification", "index", "re", "im"])
        for s, r in enumerate(records):
            lam = "" if r.lam is None else r.lam.value
            res = "" if r.residual is None else format(r.residual, ".17g")
            cls = r.classification
            cls = "" if cls is None else cls.value
            for i, v in enumerate(r.seq):
                w.writerow([s, lam, res, cls, i, format(_f(v.real), ".17g"), format(_f(v.imag), ".17g")])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def _verify(rec: SequenceRecord, stored_res, stored_cls, where: str, tol: float) -> None:
    if rec.lam is not None and not rec.zero:
        res = rec.residual
        if res > tol:
            raise ValueError(f"{where}: residual {res:.3g} exceeds {tol:g} for lambda {rec.lam}")
    if stored_cls not in (None, ""):
        cls = rec.classification
        if cls is None or cls.value != Eigenvalue.parse(stored_cls).value:
            raise ValueError(f"{where}: stored classification {stored_cls} does not verify")
    if stored_res not in (None, "") and rec.lam is not None and not rec.zero:
        if abs(float(stored_res) - rec.residual) > max(tol, 10 * abs(float(stored_res))):
            raise ValueError(f"{where}: stored residual {stored_res} does not verify")


def loads_records(text: str, fmt: str | None = None, tol: float = RTOL) -> list[SequenceRecord]:
    """Parse a sequence file and re-verify each record's residual and class.

    A bare JSON array of pairs, or a plain ``index,re,im`` CSV, loads as one
    untagged record.
    """
    if fmt is None:
        fmt = "json" if text.lstrip()[:1] in "[{" else "csv"
    out = []
    if fmt == "json":
        doc = json.loads(text)
        if isinstance(doc, list):
            return [SequenceRecord(sequence_from_pairs(doc), None)]
        for i, d in enumerate(doc["sequences"]):
            lam = None if d.get("lambda") is None else Eigenvalue.parse(d["lambda"])
            rec = SequenceRecord(sequence_from_pairs(d["entries"]), lam, bool(d.get("zero")), d.get("provenance"))
            _verify(rec, d.get("residual"), d.get("classification"), f"sequence {i}", tol)
            out.append(rec)
        return out
    if fmt == "csv":
        header = text.lstrip().splitlines()[0].split(",") if text.strip() else []
        if "seq" not in header:
            return [SequenceRecord(sequence_from_csv(text), None)]
        groups: dict[int, list[dict]] = {}
        for r in csv.DictReader(_io.StringIO(text)):
            groups.setdefault(int(r["seq"]), []).append(r)
        for s in sorted(groups):
            rows = groups[s]
            seq = np.zeros(len(rows), dtype=complex)
            for r in rows:
                seq[int(r["index"])] = float(r["re"]) + 1j * float(r["im"])
            lam = Eigenvalue.parse(rows[0]["lambda"]) if rows[0]["lambda"] else None
            rec = SequenceRecord(as_sequence(seq), lam, zero=not np.any(seq))
            _verify(rec, rows[0]["residual"], rows[0]["classification"], f"sequence {s}", tol)
            out.append(rec)
        return out
    raise ValueError(f"unknown format {fmt!r}")


def _fmt_for(path) -> str:
    return "csv" if Path(path).suffix.lower() == ".csv" else "json"


def write_records(path, records, fmt: str | None = None) -> None:
    Path(path).write_text(dumps_records(records, fmt or _fmt_for(path)))


def read_records(path, tol: float = RTOL) -> list[SequenceRecord]:
    return loads_records(Path(path).read_text(), _fmt_for(path), tol)


def load_sequence(path) -> np.ndarray:
    """First sequence from any of the sequence formats."""
    recs = read_records(path)
    if not recs:
        raise ValueError(f"{path}: no sequences")
    return recs[0].seq


def save_pool(path, pool: SignaturePool) -> None:
    write_records(path, [SequenceRecord.from_invariant(e) for e in pool.entries], "json")


def load_pool(path) -> SignaturePool:
    recs = read_records(path)
    if any(r.lam is None for r in recs):
        raise ValueError(f"{path}: every pool entry needs a lambda tag")
    return SignaturePool(tuple(r.to_invariant() for r in recs))


def mapping_matrix_to_json(G: MappingMatrix) -> dict:
    return {
        "k": G.k,
        "source_lambda": G.source_lambda.value,
        "N": G.N,
        "columns": [sequence_to_pairs(c) for c in G.columns],
    }


def mapping_matrix_from_json(doc: dict) -> MappingMatrix:
    cols = [sequence_from_pairs(c) for c in doc["columns"]]
    if len(cols) != doc["N"] or any(c.shape != (doc["N"],) for c in cols):
        raise ValueError("column count or length does not match N")
    return MappingMatrix(np.stack(cols, axis=1), int(doc["k"]), Eigenvalue.parse(doc["source_lambda"]))


@dataclass(frozen=True)
class LinkConfig:
    """Link description loaded from JSON; ``pool_file`` is resolved against the config's directory."""

    b: int
    E_max: float
    N: int
    selection: EigenspaceSelection
    pool_file: Path | None = None

    @classmethod
    def from_dict(cls, d: dict, base: Path | None = None) -> "LinkConfig":
        missing = {"b", "E_max", "N", "selection"} - set(d)
        if missing:
            raise ValueError(f"config is missing {sorted(missing)}")
        b, n, e = d["b"], d["N"], d["E_max"]
        if not isinstance(b, int) or b < 1:
            raise ValueError("b must be a positive integer")
        if not isinstance(n, int) or n < 2:
            raise ValueError("N must be an integer >= 2")
        if not isinstance(e, (int, float)) or not e > 0:
            raise ValueError("E_max must be positive")
        pool = d.get("pool_file")
        if pool is not None:
            pool = Path(pool)
            if base is not None and not pool.is_absolute():
                pool = base / pool
        return cls(b, float(e), n, EigenspaceSelection.parse(d["selection"]), pool)


def load_config(path) -> LinkConfig:
    path = Path(path)
    return LinkConfig.from_dict(json.loads(path.read_text()), path.parent)

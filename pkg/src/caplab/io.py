"""Persistence: atomic writes, CSV and JSON schemas, run manifests.

Every file is written to a temporary sibling and renamed into place, so a
failed command never leaves a partial output behind.  Floats are written
with 17 significant digits and round-trip exactly.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io as _io
import json
import os
import shutil
import tempfile
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import CaplabError, DomainError
from .rotational import (
    ContactData,
    ProfileSolution,
    SweepResult,
    SweepRow,
    find_capillary_boundary,
    find_free_boundary,
    integrate_profile,
)
from .sphere import CapParams

SWEEP_HEADER = ("r0", "R", "t_plus", "status")
PROFILE_HEADER = ("t", "r", "rp")
LATTICE_HEADER = ("s", "t", "x0", "x1", "x2", "x3", "nu0", "nu1", "nu2", "nu3")
LATTICE_SCHEMA = "caplab.lattice/1"
MANIFEST_SCHEMA = "caplab.manifest/1"


class SchemaError(CaplabError):
    """A persisted file does not match its declared schema."""


def fmt(x: float) -> str:
    """Float formatted with 17 significant digits (``nan`` kept literally)."""
    return format(float(x), ".17g")


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def atomic_write_bytes(path, data: bytes) -> Path:
    """Write ``data`` to ``path`` through a temporary file and ``os.replace``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def atomic_write_text(path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path, obj) -> Path:
    return atomic_write_text(path, dumps_json(obj))


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def _read_csv(path, header) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != tuple(header):
        raise SchemaError(f"{path}: expected header {','.join(header)}")
    return rows[1:]


# Sweeps and profiles.

def sweep_csv_text(result: SweepResult) -> str:
    return _csv_text(SWEEP_HEADER, [(r.r0, r.R, r.t_plus, r.status) for r in result.rows])


def write_sweep_csv(path, result: SweepResult) -> Path:
    return atomic_write_text(path, sweep_csv_text(result))


def read_sweep_csv(path) -> list[SweepRow]:
    out = []
    for row in _read_csv(path, SWEEP_HEADER):
        if len(row) != 4:
            raise SchemaError(f"{path}: malformed sweep row {row}")
        out.append(SweepRow(float(row[0]), float(row[1]), float(row[2]), row[3]))
    return out


def write_profile_csv(path, profile: ProfileSolution, n: int = 1025) -> Path:
    """Profile resampled on ``n`` uniform parameters over the integrated range."""
    t = np.linspace(-profile.t_max, profile.t_max, n)
    r, rp = profile.evaluate(t)
    return atomic_write_text(path, _csv_text(PROFILE_HEADER, zip(t, r, rp)))


def read_profile_csv(path) -> np.ndarray:
    rows = _read_csv(path, PROFILE_HEADER)
    return np.array(rows, dtype=float).reshape(-1, 3)


# Surface lattices.

def lattice_rows(t, s, points, normals):
    """Rows ``s, t, x0..x3, nu0..nu3``; Euclidean 3-vectors are padded with a zero."""
    pts, nus = np.asarray(points), np.asarray(normals)
    if pts.shape[-1] == 3:
        z = np.zeros(pts.shape[:-1] + (1,))
        pts, nus = np.concatenate([pts, z], -1), np.concatenate([nus, z], -1)
    for i, ti in enumerate(t):
        for j, sj in enumerate(s):
            yield (sj, ti, *pts[i, j], *nus[i, j])


def reconstruction_recipe(surface) -> dict:
    """Minimal inputs that regenerate a rotational annulus exactly."""
    if surface.ambient == "euclid":
        return {"kind": "catenoid", "n_t": surface.n_t, "n_s": surface.n_s}
    prof, c = surface.profile, surface.contact
    return {
        "kind": "rotational",
        "r0": prof.r0,
        "t_max": prof.t_max,
        "tol": prof.integrator_meta["tol"],
        "truncation": c.kind,
        "t_plus": c.t_plus,
        "n_t": surface.n_t,
        "n_s": surface.n_s,
    }


def rebuild_surface(recipe: dict):
    """Inverse of :func:`reconstruction_recipe`."""
    from .surface import build_annulus, build_catenoid

    if recipe["kind"] == "catenoid":
        return build_catenoid(recipe["n_t"], recipe["n_s"])
    if recipe["kind"] != "rotational":
        raise SchemaError(f"unknown surface kind {recipe['kind']!r}")
    prof = integrate_profile(recipe["r0"], recipe["t_max"], recipe["tol"])
    if recipe["truncation"] == "free":
        contact = find_free_boundary(prof)
    else:
        contact = find_capillary_boundary(prof, recipe["t_plus"])
    return build_annulus(prof, contact, recipe["n_t"], recipe["n_s"])


def write_lattice(stem, t, s, points, normals, header: dict) -> tuple[Path, Path]:
    """Write ``<stem>.csv`` and its JSON header ``<stem>.json``.

    The header records the schema, grid shape and the CSV content hash,
    plus whatever contact data and residuals the caller supplies.
    """
    stem = Path(stem)
    text = _csv_text(LATTICE_HEADER, lattice_rows(t, s, points, normals))
    csv_path = atomic_write_text(stem.with_suffix(".csv"), text)
    head = {
        "schema": LATTICE_SCHEMA,
        "columns": list(LATTICE_HEADER),
        "shape": [len(t), len(s)],
        "dimension": int(np.asarray(points).shape[-1]),
        "csv": csv_path.name,
        "csv_sha256": sha256_bytes(text.encode("utf-8")),
        **header,
    }
    return csv_path, write_json(stem.with_suffix(".json"), head)


def write_surface(stem, surface) -> tuple[Path, Path]:
    """Persist a :class:`RotationalAnnulus` with its contact data and recipe."""
    header = {
        "contact": surface.contact.to_dict(),
        "ambient": surface.ambient,
        "residuals": surface.meta,
        "reconstruction": reconstruction_recipe(surface),
    }
    return write_lattice(stem, surface.t, surface.s, surface.points, surface.normals, header)


@dataclass
class LatticeRecord:
    """A lattice read back from disk."""

    t: np.ndarray
    s: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    header: dict


def read_lattice(json_path) -> LatticeRecord:
    """Read a lattice through its JSON header, verifying hash and shape.

    Raises:
        SchemaError: On any mismatch.
    """
    json_path = Path(json_path)
    if json_path.suffix == ".csv":
        json_path = json_path.with_suffix(".json")
    head = read_json(json_path)
    if head.get("schema") != LATTICE_SCHEMA:
        raise SchemaError(f"{json_path}: not a lattice header")
    csv_path = json_path.parent / head["csv"]
    if sha256_file(csv_path) != head["csv_sha256"]:
        raise SchemaError(f"{csv_path}: content hash mismatch")
    data = np.array(_read_csv(csv_path, LATTICE_HEADER), dtype=float)
    n_t, n_s = head["shape"]
    if data.shape != (n_t * n_s, len(LATTICE_HEADER)):
        raise SchemaError(f"{csv_path}: expected {n_t * n_s} rows")
    grid = data.reshape(n_t, n_s, -1)
    d = head.get("dimension", 4)
    return LatticeRecord(grid[:, 0, 1], grid[0, :, 0], grid[..., 2 : 2 + d], grid[..., 6 : 6 + d], head)


def load_surface(json_path, tol: float = 1e-9):
    """Rebuild the annulus described by a lattice file and check it against the samples.

    Raises:
        SchemaError: If the header carries no recipe or the rebuilt surface
            deviates from the stored points by more than ``tol``.
    """
    rec = read_lattice(json_path)
    recipe = rec.header.get("reconstruction")
    if recipe is None:
        raise SchemaError("lattice header has no reconstruction recipe")
    surface = rebuild_surface(recipe)
    dev = float(np.abs(surface.points - rec.points).max())
    if dev > tol:
        raise SchemaError(f"rebuilt surface deviates from the stored lattice by {dev:.2e}")
    return surface


def contact_from_dict(d: dict) -> ContactData:
    return ContactData(
        d["t_plus"],
        CapParams(d["R"], d["gamma"], d["epsilon"]),
        d["x0_boundary"],
        d.get("normal_sign", 1),
        d.get("kind", "free"),
        d.get("diagnostics", {}),
    )


# Manifests.

SCHEMA_READERS = {
    "sweep.csv": read_sweep_csv,
    "profile.csv": read_profile_csv,
    "lattice.csv": lambda p: read_lattice(Path(p).with_suffix(".json")),
    "lattice.json": read_lattice,
    "json": read_json,
    "svg": lambda p: _check_svg(p),
}


def _check_svg(path) -> str:
    text = Path(path).read_text(encoding="utf-8")
    if not text.startswith("<?xml") or "<svg" not in text or not text.rstrip().endswith("</svg>"):
        raise SchemaError(f"{path}: not an SVG 1.1 document")
    return text


@dataclass
class RunManifest:
    """Record of one command invocation and the files it produced."""

    command: str
    arguments: dict
    tolerances: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    residuals: dict = field(default_factory=dict)
    seed: int | None = None
    timestamp: str = ""

    def add_output(self, path, schema: str, root=None) -> None:
        path = Path(path)
        name = str(path.relative_to(root)) if root else path.name
        self.outputs.append({"path": name, "schema": schema, "sha256": sha256_file(path)})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema"] = MANIFEST_SCHEMA
        return d


def write_manifest(directory, manifest: RunManifest) -> Path:
    if not manifest.timestamp:
        manifest.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return write_json(Path(directory) / "manifest.json", manifest.to_dict())


def validate_manifest(path) -> list[str]:
    """Check every listed output: it exists, its hash matches and its schema parses.

    Returns:
        List of problems; empty when the manifest is valid.
    """
    path = Path(path)
    m = read_json(path)
    problems = []
    if m.get("schema") != MANIFEST_SCHEMA:
        problems.append("manifest schema tag missing")
    for item in m.get("outputs", []):
        f = path.parent / item["path"]
        if not f.exists():
            problems.append(f"missing {item['path']}")
            continue
        if sha256_file(f) != item["sha256"]:
            problems.append(f"hash mismatch for {item['path']}")
        reader = SCHEMA_READERS.get(item["schema"])
        if reader is None:
            problems.append(f"unknown schema {item['schema']}")
            continue
        try:
            reader(f)
        except (SchemaError, ValueError, KeyError) as exc:
            problems.append(f"{item['path']}: {exc}")
    return problems


def inputs_hash(obj) -> str:
    """Stable hash of a JSON-serialisable description of the inputs."""
    return sha256_bytes(json.dumps(_jsonable(obj), sort_keys=True).encode("utf-8"))[:16]


@contextmanager
def staged_output(out):
    """Yield a scratch directory whose files are moved into ``out`` on success.

    On any exception the scratch directory is removed and ``out`` is left
    untouched.
    """
    out = Path(out)
    if out.exists() and not out.is_dir():
        raise DomainError(f"{out} exists and is not a directory")
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))
    try:
        yield tmp
        out.mkdir(exist_ok=True)
        for f in sorted(p for p in tmp.rglob("*") if p.is_file()):
            dest = out / f.relative_to(tmp)
            dest.parent.mkdir(parents=True, exist_ok=True)
            os.replace(f, dest)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


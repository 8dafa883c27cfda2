"""
Series cache and run manifests.

A cache entry is the serialized series under ``<cache>/<key>.json`` where
the key hashes every input that affects the coefficients.  Writes go to a
temporary file in the same directory followed by ``os.replace``, so
concurrent writers never leave a torn file.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bbcore import ALGORITHM_VERSION, AnsatzSpec, BBSeries, PotentialSpec, run_series
from .numkernel import working_precision

CACHE_ENV = "BBPERT_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "bbpert"


def cache_key(potential: PotentialSpec, ansatz: AnsatzSpec, J: int, precision: int) -> str:
    with working_precision(precision):
        payload = {
            "potential": potential.to_json(),
            "p": ansatz.p,
            "J": J,
            "precision": precision,
            "algorithm": ALGORITHM_VERSION,
        }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:32]


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


@dataclass
class RunManifest:
    command_line: list
    potential: dict
    p: int
    precision: int
    J: int
    version: str
    timestamp: str
    series_sha256: str
    cache_hit: bool = False

    def to_json(self) -> dict:
        return asdict(self)

    def verify(self, series_text: str) -> bool:
        return content_hash(series_text) == self.series_sha256

    @classmethod
    def load(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


def manifest_path(series_path) -> Path:
    series_path = Path(series_path)
    return series_path.with_name(series_path.stem + ".manifest.json")


def compute_or_load(potential: PotentialSpec, ansatz: AnsatzSpec, J: int, precision: int,
                    cache_dir=None) -> tuple[str, bool]:
    """Serialized series text plus whether it came from the cache."""
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    entry = cache_dir / f"{cache_key(potential, ansatz, J, precision)}.json"
    if entry.exists():
        text = entry.read_text(encoding="utf-8")
        try:
            BBSeries.loads(text)
            return text, True
        except (ValueError, KeyError):
            pass  # unreadable entry, recompute and overwrite
    text = run_series(potential, ansatz, J, precision).dumps()
    atomic_write(entry, text)
    return text, False


def write_series(out_path, text: str, potential: PotentialSpec, ansatz: AnsatzSpec, J: int,
                 precision: int, argv: list, cache_hit: bool) -> RunManifest:
    atomic_write(out_path, text)
    with working_precision(precision):
        manifest = RunManifest(
            command_line=list(argv),
            potential=potential.to_json(),
            p=ansatz.p,
            precision=precision,
            J=J,
            version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            series_sha256=content_hash(text),
            cache_hit=cache_hit,
        )
    atomic_write(manifest_path(out_path), json.dumps(manifest.to_json(), indent=1, sort_keys=True) + "\n")
    return manifest


def load_series(path) -> BBSeries:
    return BBSeries.loads(Path(path).read_text(encoding="utf-8"))

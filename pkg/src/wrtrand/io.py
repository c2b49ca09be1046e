"""Sample-file formats and run manifests.

CSV: optional leading ``# meta: {...}`` line, then a ``re,im`` header (or a
single ``value`` column for real data). JSON: ``{"meta": ..., "data": ...}``
where data holds ``[re, im]`` pairs or plain numbers.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def samples_to_csv(values: np.ndarray, meta: dict) -> str:
    buf = io.StringIO()
    buf.write("# meta: " + json.dumps(_jsonable(meta), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    values = np.asarray(values)
    if np.iscomplexobj(values):
        w.writerow(["re", "im"])
        w.writerows((repr(float(z.real)), repr(float(z.imag))) for z in values)
    else:
        w.writerow(["value"])
        w.writerows((repr(float(x)),) for x in values)
    return buf.getvalue()


def samples_to_json(values: np.ndarray, meta: dict) -> str:
    values = np.asarray(values)
    if np.iscomplexobj(values):
        data = [[float(z.real), float(z.imag)] for z in values]
    else:
        data = [float(x) for x in values]
    return dumps({"meta": meta, "data": data})


def read_samples(path) -> tuple[np.ndarray, dict]:
    """Load a sample file written by :func:`samples_to_csv` or :func:`samples_to_json`."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        data = obj.get("data", [])
        meta = obj.get("meta", {})
        if data and isinstance(data[0], list):
            arr = np.asarray(data, dtype=float)
            return arr[:, 0] + 1j * arr[:, 1], meta
        return np.asarray(data, dtype=float), meta
    meta = {}
    lines = []
    for line in text.splitlines():
        if line.startswith("# meta: "):
            meta = json.loads(line[len("# meta: "):])
        elif line.startswith("#") or not line.strip():
            continue
        else:
            lines.append(line)
    rows = list(csv.reader(lines))
    header, body = rows[0], rows[1:]
    arr = np.asarray(body, dtype=float).reshape(len(body), len(header))
    if header[:2] == ["re", "im"]:
        return arr[:, 0] + 1j * arr[:, 1], meta
    return arr[:, 0], meta


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def versions() -> dict:
    import mpmath
    import scipy

    from . import __version__

    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
        "wrtrand": __version__,
    }


def now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_manifest(out_path, argv, seed, started, extra=None, side=None, stdout_text=None) -> Path:
    """Write the run manifest; by default next to ``out_path`` as ``<out>.manifest.json``.

    When the data went to stdout, pass ``out_path=None``, an explicit ``side``
    path and the emitted text so its digest is recorded under ``<stdout>``.
    """
    if out_path is not None:
        out_path = Path(out_path)
        outputs = {out_path.name: sha256_file(out_path)}
        side = side or out_path.with_name(out_path.name + ".manifest.json")
    else:
        outputs = {"<stdout>": hashlib.sha256(stdout_text.encode("utf-8")).hexdigest()}
    manifest = {
        "argv": list(argv),
        "executable": sys.argv[0],
        "seed": seed,
        "versions": versions(),
        "started": started,
        "finished": now(),
        "outputs": outputs,
    }
    if extra:
        manifest.update(extra)
    side = Path(side)
    side.write_text(dumps(manifest), encoding="utf-8")
    return side

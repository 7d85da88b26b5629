"""On-disk cache of multiplicity tables keyed by (GCM hash, height bound)."""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
ENV_VAR = "KMCF_CACHE_DIR"


class MultiplicityCache:
    """JSON files named ``<hash>_h<h_max>.json``, written atomically.

    Concurrent writers may duplicate work; the last rename wins, which is
    harmless because entries are deterministic.
    """

    def __init__(self, directory: str | os.PathLike):
        self.dir = Path(directory)

    @classmethod
    def from_env(cls, directory: str | None = None) -> MultiplicityCache | None:
        directory = directory or os.environ.get(ENV_VAR)
        return cls(directory) if directory else None

    def _path(self, gcm_hash: str, h_max: int) -> Path:
        return self.dir / f"{gcm_hash}_h{h_max}.json"

    def load(self, cartan, h_max: int):
        """Return ``(mult, h)`` from the smallest cached table covering h_max, or None."""
        if not self.dir.is_dir():
            return None
        key = cartan.content_hash()
        pat = re.compile(rf"^{key}_h(\d+)\.json$")
        best = None
        for p in self.dir.iterdir():
            m = pat.match(p.name)
            if m and int(m.group(1)) >= h_max and (best is None or int(m.group(1)) < best[0]):
                best = (int(m.group(1)), p)
        if best is None:
            return None
        try:
            data = json.loads(best[1].read_text())
        except (OSError, ValueError):
            log.warning("ignoring unreadable cache file %s", best[1])
            return None
        if data.get("format_version") != FORMAT_VERSION or data.get("gcm_hash") != key:
            return None
        if data.get("matrix") != [list(r) for r in cartan.entries]:
            return None
        h = data["h_max"]
        mult = {tuple(e["root"]): int(e["m"]) for e in data["entries"]}
        return mult, h

    def store(self, cartan, h_max: int, mult) -> Path:
        self.dir.mkdir(parents=True, exist_ok=True)
        key = cartan.content_hash()
        payload = {
            "format_version": FORMAT_VERSION,
            "gcm_hash": key,
            "matrix": [list(r) for r in cartan.entries],
            "h_max": h_max,
            "entries": [
                {"root": list(b), "m": str(m) if m > 2**53 else m}
                for b, m in sorted(mult.items(), key=lambda kv: (sum(kv[0]), kv[0]))
            ],
        }
        target = self._path(key, h_max)
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh)
            os.replace(tmp, target)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
        return target

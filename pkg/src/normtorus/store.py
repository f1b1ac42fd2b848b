"""
Append-only result store with a content-hash manifest.

Records are keyed by (group, bound, normalization version); a file, once
written, is never overwritten — a rerun must reproduce the identical
bytes, and a mismatch is an error, which is what makes golden reruns
meaningful.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path


class StoreError(OSError):
    pass


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class ResultStore:
    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.root / "manifest.json"

    def _load_manifest(self) -> dict:
        if self.manifest_path.exists():
            return json.loads(self.manifest_path.read_text())
        return {}

    def _save_manifest(self, m: dict):
        self.manifest_path.write_text(json.dumps(m, indent=2, sort_keys=True) + "\n")

    def key(self, kind: str, group: str, bound, normalization: str, ext: str) -> str:
        return f"{kind}-{group}-{bound}-{normalization}.{ext}"

    def write(self, name: str, data: str) -> Path:
        """Write data under name; if the file already exists its bytes must
        match exactly (append-only store)."""
        path = self.root / name
        raw = data.encode()
        digest = sha256_bytes(raw)
        manifest = self._load_manifest()
        if path.exists():
            if sha256_bytes(path.read_bytes()) != digest:
                raise StoreError(
                    f"{path} exists with different content; the store is append-only")
        else:
            tmp = path.with_suffix(path.suffix + ".tmp")
            tmp.write_bytes(raw)
            os.replace(tmp, path)
        manifest[name] = digest
        self._save_manifest(manifest)
        return path

    def read(self, name: str) -> str:
        path = self.root / name
        if not path.exists():
            raise StoreError(f"no record {name}")
        return path.read_text()

    def has(self, name: str) -> bool:
        return (self.root / name).exists()

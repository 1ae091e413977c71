"""Simplification backends: anything that maps test items to outputs.

Four kinds cover the practical cases without binding to any model
framework: identity (copy the input), file_map (precomputed outputs),
http_completion (a chat endpoint), and subprocess (line protocol:
one input sentence per stdin line, one output per stdout line,
order-preserving).
"""

from __future__ import annotations

import hashlib
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from ..errors import BackendError, InputError
from ..ioutil import read_jsonl
from ..promptgen.client import CompletionError, HttpCompletionClient, ModelParams


class IdentityBackend:
    """Echoes every input unchanged; the do-nothing baseline."""

    kind = "identity"

    def config_fingerprint(self) -> dict:
        return {"kind": self.kind}

    def simplify(self, items) -> dict[str, str]:
        return {item.id: item.input for item in items}


class FileMapBackend:
    """Precomputed outputs keyed by test id, one {id, output} object per line.

    Coverage is checked before anything is scored: a map missing any
    test-set id fails fast listing exactly the missing ids.
    """

    kind = "file_map"

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._map: dict[str, str] = {}
        for lineno, obj in read_jsonl(self.path):
            if "id" not in obj or "output" not in obj:
                raise InputError(f"{self.path}:{lineno}: file map lines need id and output")
            self._map[str(obj["id"])] = str(obj["output"])

    def config_fingerprint(self) -> dict:
        # Hash the map content, not the path, so relocated but identical
        # outputs fingerprint the same.
        digest = hashlib.sha256()
        for key in sorted(self._map):
            digest.update(key.encode("utf-8") + b"\x00" + self._map[key].encode("utf-8") + b"\x00")
        return {"kind": self.kind, "content_sha256": digest.hexdigest()}

    def check_coverage(self, items) -> None:
        missing = [item.id for item in items if item.id not in self._map]
        if missing:
            raise InputError(
                f"file map {self.path} is missing outputs for {len(missing)} test ids: "
                + ", ".join(missing)
            )

    def simplify(self, items) -> dict[str, str]:
        self.check_coverage(items)
        return {item.id: self._map[item.id] for item in items}


class HttpBackend:
    """Sends each input sentence to a chat-style completion endpoint."""

    kind = "http_completion"

    def __init__(self, url: str, model: str = "default", token_env: str = "SIMPKIT_TOKEN",
                 timeout: float = 30.0, workers: int = 4, client=None):
        self.url = url
        self.model = model
        self.workers = max(1, workers)
        self._client = client or HttpCompletionClient(url, token_env=token_env, timeout=timeout)

    def config_fingerprint(self) -> dict:
        return {"kind": self.kind, "url": self.url, "model": self.model}

    def _one(self, item) -> str:
        messages = ({"role": "user", "content": item.input},)
        return self._client.complete(messages, ModelParams(model=self.model))

    def simplify(self, items) -> dict[str, str]:
        outputs: dict[str, str] = {}
        failed: list[str] = []
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = {item.id: pool.submit(self._one, item) for item in items}
            for item_id, future in futures.items():
                try:
                    outputs[item_id] = future.result()
                except CompletionError:
                    failed.append(item_id)
        if failed:
            raise BackendError(
                f"endpoint failed for {len(failed)} test ids: " + ", ".join(sorted(failed))
            )
        return outputs


class SubprocessBackend:
    """Runs a command reading input lines on stdin, writing outputs on stdout."""

    kind = "subprocess"

    def __init__(self, argv: list[str], timeout: float = 300.0):
        if not argv:
            raise InputError("subprocess backend needs a non-empty command line")
        self.argv = list(argv)
        self.timeout = timeout

    def config_fingerprint(self) -> dict:
        return {"kind": self.kind, "argv": self.argv}

    def simplify(self, items) -> dict[str, str]:
        stdin = "".join(item.input.replace("\n", " ") + "\n" for item in items)
        try:
            proc = subprocess.run(
                self.argv, input=stdin, capture_output=True, text=True, timeout=self.timeout
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise BackendError(f"backend command failed to run: {exc}") from exc
        if proc.returncode != 0:
            raise BackendError(
                f"backend command exited {proc.returncode}: {proc.stderr.strip()[:300]}"
            )
        lines = proc.stdout.splitlines()
        if len(lines) != len(items):
            raise BackendError(
                f"backend wrote {len(lines)} lines for {len(items)} inputs "
                "(the protocol is one output line per input line)"
            )
        return {item.id: line for item, line in zip(items, lines)}


def parse_backend_spec(spec: str, model: str = "default", token_env: str = "SIMPKIT_TOKEN",
                       timeout: float = 30.0, workers: int = 4):
    """Parse a CLI backend spec: identity | file:<path> | http:<url> | cmd:"<argv>"."""
    if spec == "identity":
        return IdentityBackend()
    if spec.startswith("file:"):
        return FileMapBackend(spec[len("file:"):])
    if spec.startswith("http:"):
        url = spec[len("http:"):]
        if url.startswith("//"):
            url = "http:" + url  # http://host style spec: keep the scheme
        return HttpBackend(url, model=model, token_env=token_env, timeout=timeout, workers=workers)
    if spec.startswith("https://"):
        return HttpBackend(spec, model=model, token_env=token_env, timeout=timeout, workers=workers)
    if spec.startswith("cmd:"):
        return SubprocessBackend(shlex.split(spec[len("cmd:"):]))
    raise InputError(
        f"unknown backend spec {spec!r} (expected identity, file:<path>, http:<url>, "
        'or cmd:"<command>")'
    )

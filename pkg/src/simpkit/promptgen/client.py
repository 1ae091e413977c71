"""Completion clients and rate limiting.

The pipeline only needs one method, complete(messages, params) -> str,
so anything implementing it plugs in: the HTTP client for real
endpoints, CallableClient for local rules and test stubs.
"""

from __future__ import annotations

import os
import threading
import time
from collections import deque
from dataclasses import dataclass
from typing import Callable, Protocol

import requests

from ..errors import BackendError, InputError


@dataclass(frozen=True)
class ModelParams:
    model: str
    temperature: float = 0.0
    max_tokens: int = 256


class CompletionError(BackendError):
    """Endpoint call failed. transient=True means a retry may succeed."""

    def __init__(self, message: str, transient: bool):
        super().__init__(message)
        self.transient = transient


class CompletionClient(Protocol):
    def complete(self, messages: tuple[dict, ...], params: ModelParams) -> str: ...


class CallableClient:
    """Adapter turning any (messages, params) -> str callable into a client."""

    def __init__(self, fn: Callable[[tuple[dict, ...], ModelParams], str]):
        self._fn = fn

    def complete(self, messages: tuple[dict, ...], params: ModelParams) -> str:
        return self._fn(messages, params)


class HttpCompletionClient:
    """Generic chat-style HTTP endpoint client.

    POSTs {model, messages, temperature, max_tokens} and reads
    choices[0].message.content. The auth token comes from the named
    environment variable; a missing token fails at construction, before
    any network traffic.
    """

    def __init__(self, url: str, token_env: str = "SIMPKIT_TOKEN", timeout: float = 30.0,
                 session: requests.Session | None = None):
        if not url:
            raise InputError("endpoint URL must be non-empty")
        token = os.environ.get(token_env)
        if not token:
            raise InputError(
                f"no endpoint credential: environment variable {token_env} is unset or empty"
            )
        self.url = url
        self.timeout = timeout
        self._headers = {"Authorization": f"Bearer {token}"}
        self._session = session or requests.Session()

    def complete(self, messages: tuple[dict, ...], params: ModelParams) -> str:
        payload = {
            "model": params.model,
            "messages": list(messages),
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        try:
            response = self._session.post(self.url, json=payload, headers=self._headers,
                                          timeout=self.timeout)
        except requests.RequestException as exc:
            raise CompletionError(f"endpoint request failed: {exc}", transient=True) from exc
        if response.status_code == 429 or response.status_code >= 500:
            raise CompletionError(
                f"endpoint returned {response.status_code}", transient=True
            )
        if response.status_code != 200:
            raise CompletionError(
                f"endpoint returned {response.status_code}: {response.text[:200]}",
                transient=False,
            )
        try:
            body = response.json()
            content = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise CompletionError(f"malformed endpoint response: {exc!r}", transient=False) from exc
        if not isinstance(content, str):
            raise CompletionError("endpoint returned non-text content", transient=False)
        return content


class RateLimiter:
    """Sliding-window limiter: at most `rps` acquisitions in any 1-second
    half-open window.

    Keeps the timestamps of the last `rps` grants; a new grant waits until
    the oldest of them is a full second in the past. (A refilling token
    bucket would allow nearly 2r sends inside one window straddling a
    refill, which breaks the guarantee.)
    """

    def __init__(self, rps: int, clock=time.monotonic, sleep=time.sleep):
        if rps < 1:
            raise InputError(f"rate limit must be >= 1 request/second, got {rps}")
        self.rps = int(rps)
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._grants: deque[float] = deque()

    def acquire(self) -> float:
        while True:
            with self._lock:
                now = self._clock()
                while self._grants and now - self._grants[0] >= 1.0:
                    self._grants.popleft()
                if len(self._grants) < self.rps:
                    self._grants.append(now)
                    return now
                wait = self._grants[0] + 1.0 - now
            self._sleep(max(wait, 0.0))


class RateLimitedClient:
    """Client decorator gating every request through a RateLimiter."""

    def __init__(self, inner: CompletionClient, limiter: RateLimiter):
        self._inner = inner
        self._limiter = limiter

    def complete(self, messages: tuple[dict, ...], params: ModelParams) -> str:
        self._limiter.acquire()
        return self._inner.complete(messages, params)

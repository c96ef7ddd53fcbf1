"""HTTP knowledge-base client speaking the batch ``/known`` protocol.

Requests are chunked to the configured batch size and each chunk is POSTed
as a JSON array of identifier strings; the response maps every queried
identifier to ``{"known": <bool>}``.  Timeouts and 5xx answers are retried a
bounded number of times; malformed responses are fatal.
"""

from __future__ import annotations

import time
from typing import Sequence

import requests

from .ids import NodeId, parse_swhid, render_swhid
from .kb import KbBackend, KbError


class KbTransportError(KbError):
    """Network-level failure that persisted through the retry budget."""


class KbHttpError(KbError):
    """The server answered with a non-success status."""

    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


class KbProtocolError(KbError):
    """The server answered 200 but the body violates the protocol."""


class HttpKb(KbBackend):
    """Membership oracle backed by a remote ``/known`` endpoint."""

    def __init__(self, base_url: str, batch_size: int = 1000, timeout: float = 30.0,
                 retries: int = 3, token: str | None = None,
                 session: requests.Session | None = None):
        super().__init__()
        if batch_size < 1:
            raise ValueError("batch_size must be positive")
        self.base_url = base_url.rstrip("/")
        self.batch_size = batch_size
        self.timeout = timeout
        self.retries = retries
        self.label = self.base_url
        self._session = session or requests.Session()
        if token:
            self._session.headers["Authorization"] = f"Bearer {token}"

    def _query(self, ids: Sequence[NodeId]) -> dict[NodeId, bool]:
        answers: dict[NodeId, bool] = {}
        for start in range(0, len(ids), self.batch_size):
            chunk = ids[start:start + self.batch_size]
            answers.update(self._query_chunk(chunk))
        return answers

    def _query_chunk(self, chunk: Sequence[NodeId]) -> dict[NodeId, bool]:
        payload = [render_swhid(node_id) for node_id in chunk]
        url = f"{self.base_url}/known"
        response = self._post_with_retries(url, payload)
        try:
            body = response.json()
        except ValueError as exc:
            raise KbProtocolError(f"{url}: response body is not JSON: {exc}") from exc
        if not isinstance(body, dict):
            raise KbProtocolError(f"{url}: expected a JSON object, got {type(body).__name__}")

        answers: dict[NodeId, bool] = {}
        for swhid, value in body.items():
            try:
                node_id = parse_swhid(swhid)
            except ValueError:
                continue  # tolerate extra keys we did not ask about
            known = value.get("known") if isinstance(value, dict) else None
            if not isinstance(known, bool):
                raise KbProtocolError(f"{url}: malformed status for {swhid}: {value!r}")
            answers[node_id] = known

        missing = [node_id for node_id in chunk if node_id not in answers]
        if missing:
            raise KbProtocolError(
                f"{url}: response missing {len(missing)} queried id(s), "
                f"first: {render_swhid(missing[0])}"
            )
        return answers

    def _post_with_retries(self, url: str, payload: list[str]) -> requests.Response:
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(min(0.1 * 2 ** (attempt - 1), 2.0))
            try:
                response = self._session.post(url, json=payload, timeout=self.timeout)
            except (requests.Timeout, requests.ConnectionError) as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = KbHttpError(
                    f"{url}: server error {response.status_code} "
                    f"on a chunk of {len(payload)} ids", response.status_code
                )
                continue
            if response.status_code != 200:
                raise KbHttpError(
                    f"{url}: unexpected status {response.status_code}: "
                    f"{response.text[:200]}", response.status_code
                )
            return response
        if isinstance(last_error, KbHttpError):
            raise last_error
        raise KbTransportError(
            f"{url}: gave up after {self.retries + 1} attempt(s): {last_error}"
        )


def http_backend(base_url: str, batch_size: int = 1000, timeout: float = 30.0,
                 retries: int = 3, token: str | None = None) -> HttpKb:
    """Build an HTTP-backed membership oracle for ``base_url``."""
    return HttpKb(base_url, batch_size=batch_size, timeout=timeout,
                  retries=retries, token=token)

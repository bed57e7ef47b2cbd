"""Provider adapters behind a common submit/poll/download protocol.

All adapters speak the same canonical shapes: jobs from batch.build_batch in,
raw result rows ({"custom_id", "message"}) out. BatchClient adds bounded
retries with jittered exponential backoff and a disk cache keyed by job id,
so an already-downloaded job never touches the network again.
"""

from __future__ import annotations

import json
import os
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import requests

from .batch import BatchJob, read_raw_rows, write_raw_rows


class ProviderError(Exception):
    """Base class for adapter failures."""


class TransientProviderError(ProviderError):
    """Retryable failure: rate limit, 5xx, connection problems."""


class PermanentProviderError(ProviderError):
    """Non-retryable failure: bad auth, bad request, failed job."""


@dataclass(frozen=True)
class PollStatus:
    state: str  # "pending" | "done" | "failed"
    detail: str | None = None


class ProviderAdapter(Protocol):
    def submit(self, job: BatchJob) -> str: ...

    def poll(self, handle: str) -> PollStatus: ...

    def download(self, handle: str, job: BatchJob | None = None) -> list[dict]: ...


def with_retries(
    fn: Callable,
    attempts: int = 5,
    base_delay: float = 1.0,
    sleep: Callable[[float], None] = time.sleep,
    rng: random.Random | None = None,
):
    """Retry transient failures with jittered exponential backoff (1s base)."""
    rng = rng or random.Random()
    for attempt in range(attempts):
        try:
            return fn()
        except TransientProviderError:
            if attempt == attempts - 1:
                raise
            sleep(base_delay * (2**attempt) * rng.uniform(0.5, 1.5))


class BatchClient:
    """Retries + result caching around a provider adapter."""

    def __init__(
        self,
        adapter: ProviderAdapter,
        cache_dir: str | Path,
        attempts: int = 5,
        base_delay: float = 1.0,
        poll_interval: float = 5.0,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.adapter = adapter
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.attempts = attempts
        self.base_delay = base_delay
        self.poll_interval = poll_interval
        self.sleep = sleep
        self.rng = rng or random.Random()

    def _cache_path(self, job: BatchJob) -> Path:
        return self.cache_dir / f"{job.job_id}.jsonl"

    def cached_rows(self, job: BatchJob) -> list[dict] | None:
        path = self._cache_path(job)
        if path.exists():
            return read_raw_rows(path)
        return None

    def _retry(self, fn):
        return with_retries(
            fn, attempts=self.attempts, base_delay=self.base_delay,
            sleep=self.sleep, rng=self.rng,
        )

    def submit(self, job: BatchJob) -> str:
        return self._retry(lambda: self.adapter.submit(job))

    def wait(self, handle: str) -> PollStatus:
        while True:
            status = self._retry(lambda: self.adapter.poll(handle))
            if status.state != "pending":
                return status
            self.sleep(self.poll_interval)

    def download(self, job: BatchJob, handle: str) -> list[dict]:
        cached = self.cached_rows(job)
        if cached is not None:
            return cached
        rows = self._retry(lambda: self.adapter.download(handle, job=job))
        tmp = self._cache_path(job).with_suffix(".tmp")
        write_raw_rows(rows, tmp)
        os.replace(tmp, self._cache_path(job))
        return rows

    def run_job(self, job: BatchJob, handle: str | None = None) -> list[dict]:
        """Fetch results for a job: cache first, else submit/poll/download.

        A stale handle (adapter restarted, job unknown) triggers one resubmit.
        """
        cached = self.cached_rows(job)
        if cached is not None:
            return cached
        resubmitted = False
        if handle is None:
            handle = self.submit(job)
            resubmitted = True
        status = self.wait(handle)
        if status.state == "failed" and not resubmitted:
            handle = self.submit(job)
            status = self.wait(handle)
        if status.state != "done":
            raise PermanentProviderError(f"job {job.job_id} failed: {status.detail}")
        return self.download(job, handle)


def _raise_for_response(response: requests.Response) -> None:
    if response.status_code == 429 or response.status_code >= 500:
        raise TransientProviderError(
            f"HTTP {response.status_code}: {response.text[:200]}"
        )
    if response.status_code >= 400:
        raise PermanentProviderError(
            f"HTTP {response.status_code}: {response.text[:200]}"
        )


class OpenAIStyleBatchAdapter:
    """Batch flow for OpenAI-compatible APIs: file upload, batch create, poll, fetch.

    Credentials come from the environment variable named by api_key_env.
    """

    def __init__(
        self,
        base_url: str = "https://api.openai.com/v1",
        api_key_env: str = "OPENAI_API_KEY",
        session: requests.Session | None = None,
        timeout: float = 120.0,
        completion_window: str = "24h",
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.session = session or requests.Session()
        self.timeout = timeout
        self.completion_window = completion_window

    def _headers(self) -> dict:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise PermanentProviderError(
                f"environment variable {self.api_key_env} is not set"
            )
        return {"Authorization": f"Bearer {key}"}

    def _call(self, method: str, url: str, **kwargs) -> requests.Response:
        try:
            response = self.session.request(
                method, url, headers=self._headers(), timeout=self.timeout, **kwargs
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise TransientProviderError(str(exc)) from exc
        _raise_for_response(response)
        return response

    def submit(self, job: BatchJob) -> str:
        lines = []
        for request in job.requests:
            lines.append(
                json.dumps(
                    {
                        "custom_id": request.custom_id,
                        "method": "POST",
                        "url": "/v1/chat/completions",
                        "body": request.body,
                    },
                    ensure_ascii=False,
                )
            )
        payload = ("\n".join(lines) + "\n").encode("utf-8")
        upload = self._call(
            "POST",
            f"{self.base_url}/files",
            files={"file": (f"{job.job_id}.jsonl", payload)},
            data={"purpose": "batch"},
        ).json()
        created = self._call(
            "POST",
            f"{self.base_url}/batches",
            json={
                "input_file_id": upload["id"],
                "endpoint": "/v1/chat/completions",
                "completion_window": self.completion_window,
            },
        ).json()
        return created["id"]

    _STATUS_MAP = {
        "validating": "pending",
        "in_progress": "pending",
        "finalizing": "pending",
        "completed": "done",
        "failed": "failed",
        "expired": "failed",
        "cancelling": "failed",
        "cancelled": "failed",
    }

    def _get_batch(self, handle: str) -> dict:
        return self._call("GET", f"{self.base_url}/batches/{handle}").json()

    def poll(self, handle: str) -> PollStatus:
        try:
            batch = self._get_batch(handle)
        except PermanentProviderError as exc:
            return PollStatus(state="failed", detail=f"unknown job: {exc}")
        state = self._STATUS_MAP.get(batch.get("status"), "pending")
        return PollStatus(state=state, detail=batch.get("status"))

    def download(self, handle: str, job: BatchJob | None = None) -> list[dict]:
        batch = self._get_batch(handle)
        file_id = batch.get("output_file_id")
        if not file_id:
            raise PermanentProviderError(f"batch {handle} has no output file")
        content = self._call("GET", f"{self.base_url}/files/{file_id}/content").text
        rows = []
        for line in content.splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            message = ""
            response = row.get("response") or {}
            body = response.get("body") or {}
            choices = body.get("choices") or []
            if choices:
                message = (choices[0].get("message") or {}).get("content") or ""
            rows.append({"custom_id": row["custom_id"], "message": message})
        return rows


class AnthropicBatchAdapter:
    """Message-batch flow for the Anthropic-style API.

    The wire format restricts custom ids to a narrow charset, so requests are
    submitted under positional ids and mapped back through the job at download
    time (the client always passes the job). The canonical `seed` field has no
    wire equivalent here and is dropped in translation.
    """

    def __init__(
        self,
        base_url: str = "https://api.anthropic.com/v1",
        api_key_env: str = "ANTHROPIC_API_KEY",
        session: requests.Session | None = None,
        timeout: float = 120.0,
        api_version: str = "2023-06-01",
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.session = session or requests.Session()
        self.timeout = timeout
        self.api_version = api_version

    def _headers(self) -> dict:
        key = os.environ.get(self.api_key_env)
        if not key:
            raise PermanentProviderError(
                f"environment variable {self.api_key_env} is not set"
            )
        return {"x-api-key": key, "anthropic-version": self.api_version}

    def _call(self, method: str, url: str, **kwargs) -> requests.Response:
        try:
            response = self.session.request(
                method, url, headers=self._headers(), timeout=self.timeout, **kwargs
            )
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise TransientProviderError(str(exc)) from exc
        _raise_for_response(response)
        return response

    @staticmethod
    def _wire_id(index: int) -> str:
        return f"q{index:06d}"

    def submit(self, job: BatchJob) -> str:
        requests_payload = []
        for index, request in enumerate(job.requests):
            params = {
                "model": request.body["model"],
                "max_tokens": request.body["max_tokens"],
                "messages": request.body["messages"],
            }
            if "temperature" in request.body:
                params["temperature"] = request.body["temperature"]
            requests_payload.append(
                {"custom_id": self._wire_id(index), "params": params}
            )
        created = self._call(
            "POST",
            f"{self.base_url}/messages/batches",
            json={"requests": requests_payload},
        ).json()
        return created["id"]

    def poll(self, handle: str) -> PollStatus:
        try:
            batch = self._call(
                "GET", f"{self.base_url}/messages/batches/{handle}"
            ).json()
        except PermanentProviderError as exc:
            return PollStatus(state="failed", detail=f"unknown job: {exc}")
        status = batch.get("processing_status")
        if status == "ended":
            return PollStatus(state="done", detail=status)
        if status in ("in_progress", "canceling"):
            return PollStatus(state="pending", detail=status)
        return PollStatus(state="pending", detail=status)

    def download(self, handle: str, job: BatchJob | None = None) -> list[dict]:
        if job is None:
            raise PermanentProviderError(
                "this adapter needs the job to restore canonical custom ids"
            )
        content = self._call(
            "GET", f"{self.base_url}/messages/batches/{handle}/results"
        ).text
        by_wire_id = {}
        for line in content.splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            result = row.get("result") or {}
            message = ""
            if result.get("type") == "succeeded":
                blocks = (result.get("message") or {}).get("content") or []
                message = "".join(
                    b.get("text", "") for b in blocks if b.get("type") == "text"
                )
            by_wire_id[row["custom_id"]] = message
        rows = []
        for index, request in enumerate(job.requests):
            rows.append(
                {
                    "custom_id": request.custom_id,
                    "message": by_wire_id.get(self._wire_id(index), ""),
                }
            )
        return rows

"""Offline provider with oracle behavior and seeded noise, for tests and dry runs."""

from __future__ import annotations

import random
from typing import Mapping, Sequence

from .batch import BatchJob, BatchRequest
from .providers import PermanentProviderError, PollStatus

_GARBAGE_WORDS = (
    "lorem", "ipsum", "quux", "wibble", "frobnicate", "garble", "mumble", "zorp",
)

DEFAULT_SLOT_MARKERS = ("App Update: ", "Review text: ")


class MockProvider:
    """In-memory adapter: jobs complete immediately and deterministically.

    behavior maps document substrings to label strings ("3" or "4;8"),
    checked in insertion order against the document payload (the text after
    the last slot marker in the prompt); no match answers with prose that
    cleans to the fallback. With noise_rate > 0 and request temperature > 0,
    a seeded fraction of rows is perturbed, in equal thirds: a wrong in-range
    label, the oracle label wrapped in prose, or digit-free garbage. Requests
    at temperature 0 (or with no temperature field) are never perturbed.
    """

    def __init__(
        self,
        behavior: Mapping[str, str],
        classes: Sequence[int],
        noise_rate: float = 0.0,
        seed: int = 0,
        slot_markers: Sequence[str] = DEFAULT_SLOT_MARKERS,
    ):
        if not 0.0 <= noise_rate <= 1.0:
            raise ValueError("noise_rate must be in [0, 1]")
        self.behavior = dict(behavior)
        self.classes = list(classes)
        self.noise_rate = noise_rate
        self.seed = seed
        self.slot_markers = tuple(slot_markers)
        self.submit_calls = 0
        self.poll_calls = 0
        self.download_calls = 0
        self._jobs: dict[str, BatchJob] = {}

    # adapter protocol

    def submit(self, job: BatchJob) -> str:
        self.submit_calls += 1
        handle = f"mock-{job.job_id}"
        self._jobs[handle] = job
        return handle

    def poll(self, handle: str) -> PollStatus:
        self.poll_calls += 1
        if handle not in self._jobs:
            return PollStatus(state="failed", detail=f"unknown job {handle!r}")
        return PollStatus(state="done")

    def download(self, handle: str, job: BatchJob | None = None) -> list[dict]:
        self.download_calls += 1
        stored = self._jobs.get(handle)
        if stored is None:
            raise PermanentProviderError(f"unknown job {handle!r}")
        return [self._row(request) for request in stored.requests]

    # behavior

    def _payload(self, prompt: str) -> str:
        best = -1
        best_marker = None
        for marker in self.slot_markers:
            idx = prompt.rfind(marker)
            if idx > best:
                best = idx
                best_marker = marker
        if best_marker is None or best < 0:
            return prompt
        return prompt[best + len(best_marker):]

    def _oracle(self, payload: str) -> str | None:
        for needle, label in self.behavior.items():
            if needle in payload:
                return label
        return None

    def _row(self, request: BatchRequest) -> dict:
        prompt = request.body["messages"][-1]["content"]
        oracle = self._oracle(self._payload(prompt))
        message = oracle if oracle is not None else "unclassifiable"

        temperature = request.body.get("temperature", 0.0)
        rate = self.noise_rate if temperature > 0 else 0.0
        if rate > 0:
            rng = random.Random(f"{self.seed}|{request.custom_id}")
            if rng.random() < rate:
                message = self._perturb(message, oracle, rng)
        return {"custom_id": request.custom_id, "message": message}

    def _perturb(self, message: str, oracle: str | None, rng: random.Random) -> str:
        kind = rng.randrange(3)
        if kind == 0:
            oracle_labels = set()
            if oracle is not None:
                oracle_labels = {int(tok) for tok in oracle.split(";")}
            candidates = [c for c in self.classes if c not in oracle_labels]
            if candidates:
                return str(rng.choice(candidates))
            return message
        if kind == 1:
            return f"The assigned category is ({message})."
        return " ".join(rng.choice(_GARBAGE_WORDS) for _ in range(3))

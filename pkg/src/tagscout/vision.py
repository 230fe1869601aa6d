"""Vision backends for the artificial analyst.

Two implementations of the same small interface: an HTTP client posting
{image_url, question?} to a captioning/VQA endpoint, and a canned-response
client replaying recorded answers keyed by image id (deterministic, used
for offline runs and fixtures).
"""

from __future__ import annotations

import json
from pathlib import Path

import requests

from tagscout.errors import TransportError
from tagscout.models import StreetImage


class HTTPVisionClient:
    """POSTs {image_url, question?} and expects {"text": ...} back."""

    def __init__(
        self,
        endpoint_url: str,
        image_url_template: str = "image://{image_id}",
        api_key: str | None = None,
        timeout_s: float = 60.0,
        session: requests.Session | None = None,
    ):
        self.endpoint_url = endpoint_url
        self.image_url_template = image_url_template
        self.api_key = api_key
        self.timeout_s = timeout_s
        self.session = session or requests.Session()

    def _post(self, payload: dict) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = self.session.post(
                self.endpoint_url, json=payload, headers=headers, timeout=self.timeout_s
            )
            resp.raise_for_status()
            return str(resp.json()["text"])
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise TransportError(f"vision backend failed: {exc}") from exc

    def _image_url(self, image: StreetImage) -> str:
        return self.image_url_template.format(image_id=image.image_id)

    def caption(self, image: StreetImage) -> str:
        return self._post({"image_url": self._image_url(image)})

    def ask(self, image: StreetImage, question: str) -> str:
        return self._post({"image_url": self._image_url(image), "question": question})


class CannedVisionClient:
    """Replays recorded captions/answers keyed by image id.

    File format: {"<image_id>": {"caption": str, "answers":
    {"users": str, "lanes": str, "surface": str, "oneway": str, "lit": str}}}.
    Answers are looked up by matching the asked question text against the
    fixed question set.
    """

    def __init__(self, entries: dict):
        self.entries = entries
        # map question text -> variable once
        from tagscout.annotation import QUESTION_SET

        self._question_vars = {q.text: q.variable for q in QUESTION_SET}

    @classmethod
    def from_file(cls, path: str | Path) -> "CannedVisionClient":
        with open(path, encoding="utf-8") as f:
            return cls(json.load(f))

    def _entry(self, image: StreetImage) -> dict:
        entry = self.entries.get(image.image_id)
        if entry is None:
            raise TransportError(f"no canned vision response for image {image.image_id}")
        return entry

    def caption(self, image: StreetImage) -> str:
        return str(self._entry(image)["caption"])

    def ask(self, image: StreetImage, question: str) -> str:
        variable = self._question_vars.get(question)
        if variable is None:
            raise TransportError(f"canned backend has no answer for question: {question!r}")
        answers = self._entry(image).get("answers", {})
        if variable not in answers:
            raise TransportError(
                f"no canned {variable} answer for image {image.image_id}"
            )
        return str(answers[variable])

"""Extraction of the advised action index from raw tutor text."""

from __future__ import annotations

import re
from dataclasses import dataclass

_TAG = re.compile(r"<action>(.*?)</action>", re.DOTALL)
_INT = re.compile(r"[+-]?[0-9]+")


@dataclass(frozen=True)
class ParseFailure:
    kind: str  # missing_tags | not_integer | out_of_range
    raw: str


def parse_action(raw: str, action_count: int) -> int | ParseFailure:
    """Return the first well-formed in-range <action>N</action> index.

    Failures are classified data, never exceptions: no tag pair at all is
    missing_tags; otherwise the first pair decides between not_integer and
    out_of_range.
    """
    matches = _TAG.findall(raw)
    if not matches:
        return ParseFailure("missing_tags", raw)
    for body in matches:
        text = body.strip()
        if _INT.fullmatch(text) and 0 <= int(text) < action_count:
            return int(text)
    first = matches[0].strip()
    if _INT.fullmatch(first):
        return ParseFailure("out_of_range", raw)
    return ParseFailure("not_integer", raw)

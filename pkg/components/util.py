from typing import Iterable, Optional

from thefuzz import fuzz, process

from components.const import INF_TEXT, SUGGESTION_CUTOFF


def did_you_mean(name: str, candidates: Iterable[str]) -> Optional[str]:
    """The declared name closest to ``name``, if any scores at least ``SUGGESTION_CUTOFF``."""
    choices = [candidate for candidate in candidates if candidate != name]
    if not choices:
        return None
    best = process.extractOne(name, choices, scorer=fuzz.ratio, score_cutoff=SUGGESTION_CUTOFF)
    return best[0] if best else None


def pair_label(index: int) -> str:
    """Spreadsheet style labels: 0 -> A, 25 -> Z, 26 -> AA."""
    label = ""
    index += 1
    while index:
        index, remainder = divmod(index - 1, 26)
        label = chr(ord("A") + remainder) + label
    return label


def format_entry(value: float) -> str:
    if value == float("inf"):
        return INF_TEXT
    return str(int(value))

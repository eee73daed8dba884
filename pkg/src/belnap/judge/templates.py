"""Prompt templates, stored verbatim as text assets under ``prompts/``."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

PROMPT_STYLES = ("direct", "zero_shot", "few_shot")

BILATERAL = {
    ("direct", "verification"): "direct_verification",
    ("direct", "refutation"): "direct_refutation",
    ("zero_shot", "verification"): "zero_shot_verification",
    ("zero_shot", "refutation"): "zero_shot_refutation",
    ("few_shot", "verification"): "few_shot_verification",
    ("few_shot", "refutation"): "few_shot_refutation",
}
UNILATERAL = {
    "direct": "unilateral_direct",
    "zero_shot": "unilateral_zero_shot",
    "few_shot": "unilateral_few_shot",
}
NEGATIVE_GENERATION = "negative_generation"
ALL_TEMPLATES = (*BILATERAL.values(), *UNILATERAL.values(), NEGATIVE_GENERATION)

# (positive, negative) conclusion markers per side
MARKERS = {
    "verification": ("VERIFIED", "CANNOT VERIFY"),
    "refutation": ("REFUTED", "CANNOT REFUTE"),
    "unilateral": ("TRUE", "FALSE"),
}

_SLOT = re.compile(r"\{(question|answer)\}")


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    if name not in ALL_TEMPLATES:
        raise KeyError(f"unknown template {name!r}")
    ref = resources.files("belnap.judge") / "prompts" / f"{name}.txt"
    with ref.open("rb") as fh:
        return fh.read().decode("utf-8")


def render(template: str, question: str, answer: str) -> str:
    """Fill ``{question}``/``{answer}`` in one pass; nothing else is touched,
    so braces inside the substituted text survive unchanged."""
    slots = {"question": question, "answer": answer}
    return _SLOT.sub(lambda m: slots[m.group(1)], template)


def template_for(style: str, side: str) -> str:
    if style not in PROMPT_STYLES:
        raise ValueError(f"unknown prompt style {style!r}; expected one of {PROMPT_STYLES}")
    if side == "unilateral":
        return load_template(UNILATERAL[style])
    return load_template(BILATERAL[(style, side)])


def negative_generation_instructions() -> str:
    """The negative-answer instructions with format-escaped braces collapsed."""
    return load_template(NEGATIVE_GENERATION).replace("{{", "{").replace("}}", "}")

"""Bilateral and unilateral factuality evaluation with an LLM judge."""

from __future__ import annotations

import math
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Union

from ..syntax import Atom, format_formula, is_ground_atom
from ..truth import E, GTV, TruthValue
from .backend import BackendError, ChatRequest
from .config import JudgeConfig
from .parsing import majority, parse_conclusion
from .templates import MARKERS, render, template_for


class TemplateError(KeyError):
    pass


@dataclass(frozen=True)
class QAItem:
    id: str
    question: str
    answer: str
    gold_label: bool
    source: str = ""

    def __post_init__(self):
        if not self.id:
            raise ValueError("QA item id must be non-empty")
        if not self.question.strip() or not self.answer.strip():
            raise ValueError(f"item {self.id}: question and answer must be non-empty")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "question": self.question,
            "answer": self.answer,
            "gold_label": self.gold_label,
            "source": self.source,
        }


@dataclass(frozen=True)
class RelationTemplate:
    """Verbalization of a relation.  ``{1}``, ``{2}``, ... are the arguments;
    the statement's first letter is capitalized.  ``question``/``answer`` may
    also use ``{statement}`` and default to a yes/no framing of the statement."""

    statement: str
    question: str = "Is the following statement true? {statement}"
    answer: str = "Yes"


Subject = Union[QAItem, Atom]

_ARG = re.compile(r"\{(\d+)\}")


def _fill(template: str, args: list[str], statement: str = "") -> str:
    def sub(m):
        i = int(m.group(1))
        if not 1 <= i <= len(args):
            raise TemplateError(f"template {template!r} refers to argument {i}")
        return args[i - 1]

    return _ARG.sub(sub, template).replace("{statement}", statement)


def _relation_template(atom: Atom, templates: Mapping[str, str | RelationTemplate] | None):
    tpl = (templates or {}).get(atom.relation)
    if tpl is None:
        raise TemplateError(f"no verbalization template for relation {atom.relation!r}")
    return RelationTemplate(tpl) if isinstance(tpl, str) else tpl


def verbalize(subject: Subject, templates: Mapping[str, str | RelationTemplate] | None = None) -> str:
    """Natural-language rendering of an atom (via its relation template) or a QA item."""
    if isinstance(subject, QAItem):
        return f"Question: {subject.question}\nProposed answer: {subject.answer}"
    if not is_ground_atom(subject):
        raise ValueError(f"can only verbalize ground atoms, got {subject!r}")
    tpl = _relation_template(subject, templates)
    text = _fill(tpl.statement, [t.name for t in subject.args])
    return text[:1].upper() + text[1:]


def prompt_slots(subject: Subject, templates=None) -> tuple[str, str]:
    """The ``(question, answer)`` pair substituted into the prompt templates."""
    if isinstance(subject, QAItem):
        return subject.question, subject.answer
    statement = verbalize(subject, templates)
    tpl = _relation_template(subject, templates)
    args = [t.name for t in subject.args]
    return _fill(tpl.question, args, statement), _fill(tpl.answer, args, statement)


def subject_key(subject: Subject) -> str:
    return subject.id if isinstance(subject, QAItem) else format_formula(subject)


def estimate_tokens(*texts: str) -> int:
    return math.ceil(sum(len(t) for t in texts) / 4)


@dataclass
class Transcript:
    prompt: str
    raw_output: str
    parsed_value: TruthValue
    latency: float
    tokens: int
    tokens_estimated: bool
    sample_index: int
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "sample_index": self.sample_index,
            "raw_output": self.raw_output,
            "parsed_value": self.parsed_value.symbol,
            "latency": self.latency,
            "tokens": self.tokens,
            "tokens_estimated": self.tokens_estimated,
            "error": self.error,
        }


@dataclass
class SideResult:
    side: str
    value: TruthValue
    transcripts: list[Transcript] = field(default_factory=list)

    @property
    def latency(self) -> float:
        return sum(t.latency for t in self.transcripts)

    @property
    def tokens(self) -> int:
        return sum(t.tokens for t in self.transcripts)

    @property
    def tokens_estimated(self) -> bool:
        return any(t.tokens_estimated for t in self.transcripts)

    def text(self) -> str:
        parts = []
        for t in self.transcripts:
            head = f"--- sample {t.sample_index}: {t.parsed_value.symbol}"
            if t.error:
                head += f" (error: {t.error})"
            parts.append(f"{head}\n{t.raw_output}")
        return "\n".join(parts)


@dataclass
class BilateralResult:
    gtv: GTV
    verification: SideResult
    refutation: SideResult

    @property
    def verification_transcript(self) -> str:
        return self.verification.text()

    @property
    def refutation_transcript(self) -> str:
        return self.refutation.text()

    @property
    def elapsed(self) -> float:
        return self.verification.latency + self.refutation.latency

    @property
    def tokens(self) -> int:
        return self.verification.tokens + self.refutation.tokens

    @property
    def meta(self) -> dict:
        return {
            "elapsed": self.elapsed,
            "tokens": self.tokens,
            "tokens_estimated": self.verification.tokens_estimated
            or self.refutation.tokens_estimated,
        }


class Judge:
    """An LLM judge: a config, a backend and the relation templates used to
    verbalize atoms."""

    def __init__(self, config: JudgeConfig, backend, relation_templates=None):
        self.config = config
        self.backend = backend
        self.relation_templates = dict(relation_templates or {})

    def _sample(self, side: str, prompt: str, subject: str, index: int) -> Transcript:
        positive, negative = MARKERS[side]
        request = ChatRequest(
            prompt=prompt,
            temperature=self.config.temperature,
            side=side,
            subject=subject,
            sample_index=index,
        )
        start = time.perf_counter()
        try:
            completion = self.backend.complete(request)
        except BackendError as exc:
            latency = exc.latency if exc.latency is not None else time.perf_counter() - start
            return Transcript(prompt, "", E, latency, estimate_tokens(prompt), True, index, str(exc))
        latency = completion.latency
        if latency is None:
            latency = time.perf_counter() - start
        raw = completion.text
        value = parse_conclusion(raw, positive, negative, lenient=self.config.lenient)
        if completion.total_tokens is not None:
            tokens, estimated = completion.total_tokens, False
        else:
            tokens, estimated = estimate_tokens(prompt, raw), True
        return Transcript(prompt, raw, value, latency, tokens, estimated, index)

    def sample_side(self, side: str, question: str, answer: str, subject: str = "") -> SideResult:
        """Run ``samples_per_side`` completions of one side's prompt and take
        the strict majority of the parsed conclusions."""
        prompt = render(template_for(self.config.prompt_style, side), question, answer)
        n = self.config.samples_per_side
        workers = min(n, self.config.max_in_flight)
        if workers == 1:
            transcripts = [self._sample(side, prompt, subject, i) for i in range(n)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                transcripts = list(
                    pool.map(lambda i: self._sample(side, prompt, subject, i), range(n))
                )
        return SideResult(side, majority([t.parsed_value for t in transcripts]), transcripts)

    def zeta(self, subject: Subject) -> BilateralResult:
        """Bilateral evaluation: verification and refutation, always both."""
        question, answer = prompt_slots(subject, self.relation_templates)
        key = subject_key(subject)
        with ThreadPoolExecutor(max_workers=2) as pool:
            ver = pool.submit(self.sample_side, "verification", question, answer, key)
            ref = pool.submit(self.sample_side, "refutation", question, answer, key)
            verification, refutation = ver.result(), ref.result()
        return BilateralResult(GTV(verification.value, refutation.value), verification, refutation)

    def unilateral(self, item: QAItem) -> SideResult:
        return self.sample_side("unilateral", item.question, item.answer, subject_key(item))

    def evaluator(self):
        """Atom evaluator for a grounded interpretation."""
        return self.zeta

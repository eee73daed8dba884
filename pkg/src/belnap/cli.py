"""Command-line interface.

Exit codes:
    0  success (check-validity exits 0 for both VALID and INVALID)
    2  usage error
    3  formula parse error
    4  unknown atom (no valuation available)
    5  backend or evaluator failure
    6  validity atom budget exceeded
    7  empty record set or undefined metric
    8  configuration error
    9  unreadable or malformed input file
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import __version__
from .bench.dataset import DatasetError, load_dataset, write_dataset
from .bench.metrics import EmptyRecordsError, UndefinedMetricError, compute_report
from .bench.negatives import generate_negatives
from .bench.report import render_json, render_text
from .bench.runner import load_records, run_evaluation, write_records
from .cache import CacheCorruptError, ValuationCache
from .interpretation import (
    EvaluatorError,
    GroundedInterpretation,
    StandardInterpretation,
    TableFormatError,
    load_table,
)
from .judge.backend import BackendError, ChatCompletionBackend, MockBackend
from .judge.config import ConfigError, load_config
from .judge.core import Judge, RelationTemplate, TemplateError
from .manifest import RunManifest, manifest_path
from .semantics import UnknownAtomError, evaluate, evaluate_with_trace
from .syntax import FormulaError, Signature, format_formula, parse_formula
from .truth import DEFAULT_MODE, QuantifierMode
from .validity import DEFAULT_BUDGET, BudgetExceededError, check_validity

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_UNKNOWN_ATOM = 4
EXIT_BACKEND = 5
EXIT_BUDGET = 6
EXIT_EMPTY = 7
EXIT_CONFIG = 8
EXIT_INPUT = 9


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> None:
    _out(json.dumps(obj, indent=2, sort_keys=True))


def _constants(text: str | None) -> tuple[str, ...]:
    return tuple(c for c in (text or "").replace(",", " ").split() if c)


def _parse(text: str):
    try:
        return parse_formula(text)
    except FormulaError as exc:
        raise CommandError(f"cannot parse {text!r}: {exc}", EXIT_PARSE) from exc


def _write_manifest(manifest: RunManifest, args, default_output: str | None) -> None:
    target = args.manifest or (manifest_path(default_output) if default_output else None)
    if target:
        manifest.outputs.setdefault("manifest", target)
        manifest.write(target)


# -- judge construction ------------------------------------------------------


def _config(args):
    overrides = {
        "prompt_style": getattr(args, "prompt_style", None),
        "samples_per_side": getattr(args, "samples", None),
        "temperature": getattr(args, "temperature", None),
        "base_url": getattr(args, "base_url", None),
        "model": getattr(args, "model", None),
    }
    return load_config(args.config, overrides)


def _load_templates(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CommandError(f"cannot read templates {path}: {exc}", EXIT_INPUT) from exc
    out = {}
    for rel, tpl in raw.items():
        out[rel] = RelationTemplate(tpl) if isinstance(tpl, str) else RelationTemplate(**tpl)
    return out


def _judge(args, templates=None) -> Judge:
    config = _config(args)
    if args.mock:
        try:
            backend = MockBackend.from_file(args.mock)
        except (OSError, json.JSONDecodeError) as exc:
            raise CommandError(f"cannot read mock script {args.mock}: {exc}", EXIT_INPUT) from exc
    else:
        if not config.base_url or not config.model:
            raise ConfigError("a live judge needs base_url and model (or use --mock)")
        backend = ChatCompletionBackend(config)
    return Judge(config, backend, templates)


def _open_cache(args) -> ValuationCache:
    try:
        return ValuationCache(args.cache, strict=args.strict_cache)
    except CacheCorruptError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from exc
    except OSError as exc:
        raise CommandError(f"cannot open cache {args.cache}: {exc}", EXIT_INPUT) from exc


def _atom_evaluator(judge: Judge):
    """zeta, except that a side whose every call failed is an error rather
    than a valuation (so nothing gets cached for it)."""

    def evaluate_atom(atom):
        result = judge.zeta(atom)
        for side in (result.verification, result.refutation):
            if side.transcripts and all(t.error for t in side.transcripts):
                raise BackendError(f"{side.side}: {side.transcripts[0].error}")
        return result

    return evaluate_atom


# -- commands ------------------------------------------------------------------


def cmd_eval_formula(args) -> int:
    formula = _parse(args.formula)
    mode = QuantifierMode(args.mode)
    manifest = RunManifest("eval-formula", inputs={"formula": args.formula})
    if args.interp:
        try:
            interp = load_table(args.interp)
        except OSError as exc:
            raise CommandError(f"cannot read {args.interp}: {exc}", EXIT_INPUT) from exc
        except TableFormatError as exc:
            raise CommandError(str(exc), EXIT_INPUT) from exc
        manifest.inputs["interpretation"] = args.interp
        if args.constants:
            interp = StandardInterpretation(
                Signature(interp.sig.constants + _constants(args.constants), interp.sig.relations),
                interp.table,
            )
    else:
        judge = _judge(args, _load_templates(args.templates))
        sig = Signature.infer([formula], _constants(args.constants))
        cache = _open_cache(args) if args.cache else ValuationCache(strict=args.strict_cache)
        fp = judge.config.fingerprint()
        interp = GroundedInterpretation(sig, _atom_evaluator(judge), cache, fp)
        manifest.config_fingerprint = fp
        if args.cache:
            manifest.inputs["cache"] = args.cache
    if args.trace:
        trace = evaluate_with_trace(interp, formula, mode)
        value = trace.value
    else:
        value, trace = evaluate(interp, formula, mode), None
    if args.format == "structured":
        doc = {"formula": format_formula(formula), "gtv": value.code, "mode": mode.value}
        if trace is not None:
            doc["trace"] = trace.to_dict()
        _dump(doc)
    else:
        _out(value.code)
        if trace is not None:
            _out(trace.render())
    _write_manifest(manifest, args, None)
    return EXIT_OK


def _read_premises(args) -> list[str]:
    texts: list[str] = []
    if args.premises_file:
        try:
            with open(args.premises_file, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise CommandError(f"cannot read {args.premises_file}: {exc}", EXIT_INPUT) from exc
        for line in lines:
            line = line.split("#", 1)[0]
            texts.extend(p for p in line.split(";") if p.strip())
    for p in args.premise or []:
        texts.extend(q for q in p.split(";") if q.strip())
    return texts


def cmd_check_validity(args) -> int:
    premises = [_parse(p) for p in _read_premises(args)]
    conclusion = _parse(args.conclusion)
    try:
        sig = Signature.infer(premises + [conclusion], _constants(args.constants))
    except FormulaError as exc:
        raise CommandError(str(exc), EXIT_PARSE) from exc
    try:
        verdict = check_validity(premises, conclusion, sig, args.budget, QuantifierMode(args.mode))
    except BudgetExceededError as exc:
        raise CommandError(str(exc), EXIT_BUDGET) from exc
    if args.format == "structured":
        doc = verdict.to_dict()
        doc["premises"] = [format_formula(p) for p in premises]
        doc["conclusion"] = format_formula(conclusion)
        _dump(doc)
    else:
        _out(verdict.to_text())
    manifest = RunManifest(
        "check-validity",
        inputs={"conclusion": args.conclusion, **({"premises": args.premises_file} if args.premises_file else {})},
    )
    _write_manifest(manifest, args, None)
    return EXIT_OK


def cmd_judge(args) -> int:
    try:
        items = load_dataset(args.dataset)
    except DatasetError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from exc
    manifest = RunManifest("judge", inputs={"dataset": args.dataset})
    judge = _judge(args)
    cache = _open_cache(args) if args.cache else ValuationCache(strict=args.strict_cache)
    records = run_evaluation(items, judge, args.mode, cache, max_workers=args.workers)
    write_records(records, args.out)
    calls = getattr(judge.backend, "calls", None)
    manifest.config_fingerprint = judge.config.fingerprint()
    manifest.inputs.update({"cache": args.cache} if args.cache else {})
    manifest.inputs.update({"mock": args.mock} if args.mock else {})
    manifest.outputs["records"] = args.out
    manifest.extra = {"mode": args.mode, "items": len(items), "backend_calls": calls}
    _write_manifest(manifest, args, args.out)
    sys.stderr.write(f"{len(records)} records written to {args.out} ({calls} backend calls)\n")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        records = load_records(args.records)
    except OSError as exc:
        raise CommandError(f"cannot read {args.records}: {exc}", EXIT_INPUT) from exc
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from exc
    try:
        report = compute_report(records, args.seed, args.resamples, args.subsample)
    except (EmptyRecordsError, UndefinedMetricError) as exc:
        raise CommandError(str(exc), EXIT_EMPTY) from exc
    text = render_json(report) if args.format == "structured" else render_text(report, args.label)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    manifest = RunManifest(
        "report",
        seed=args.seed,
        inputs={"records": args.records},
        outputs={"report": args.out} if args.out else {},
    )
    _write_manifest(manifest, args, args.out)
    return EXIT_OK


def cmd_negatives(args) -> int:
    try:
        items = load_dataset(args.dataset)
    except DatasetError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from exc
    judge = _judge(args)
    result = generate_negatives(items, judge)
    write_dataset(result.items, args.out)
    manifest = RunManifest(
        "negatives",
        config_fingerprint=judge.config.fingerprint(),
        inputs={"dataset": args.dataset},
        outputs={"dataset": args.out},
        extra={"generated": len(result.items), "skipped": [i for i, _ in result.skipped]},
    )
    _write_manifest(manifest, args, args.out)
    sys.stderr.write(
        f"{len(result.items)} negative items written to {args.out}; {len(result.skipped)} skipped\n"
    )
    return EXIT_OK


def cmd_cache_inspect(args) -> int:
    cache = _open_cache(args)
    entries = cache.items()
    if args.key:
        entries = [(k, e) for k, e in entries if k == args.key]
        if not entries:
            raise CommandError(f"no entry for {args.key!r}", EXIT_UNKNOWN_ATOM)
    if args.format == "structured":
        _dump([e.to_record(k) for k, e in entries])
        return EXIT_OK
    if not args.key:
        _out(f"{len(entries)} entries in {args.cache}")
    for k, e in entries:
        _out(f"{k}\t{e.gtv.code}\t{e.created_at}")
        if args.key:
            _out(f"verification:\n{e.verification_transcript}\nrefutation:\n{e.refutation_transcript}")
    return EXIT_OK


def cmd_cache_export(args) -> int:
    cache = _open_cache(args)
    if args.format == "table":
        lines = []
        for key, entry in cache.items():
            atom_key = key.partition("|")[2] if cache.strict else key
            try:
                atom = parse_formula(atom_key)
            except FormulaError:
                continue
            lines.append(f"{format_formula(atom)} {entry.gtv.code}")
        text = "".join(f"{line}\n" for line in sorted(lines))
    else:
        text = "".join(json.dumps(e.to_record(k), sort_keys=True) + "\n" for k, e in cache.items())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _write_manifest(RunManifest("cache export", inputs={"cache": args.cache},
                                    outputs={"export": args.out}), args, args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def _judge_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("judge")
    g.add_argument("--config", help="judge config (JSON)")
    g.add_argument("--mock", metavar="SCRIPT", help="use the scripted mock backend instead of HTTP")
    g.add_argument("--base-url")
    g.add_argument("--model")
    g.add_argument("--prompt-style", choices=("direct", "zero_shot", "few_shot"))
    g.add_argument("--samples", type=int, help="samples per side (majority vote)")
    g.add_argument("--temperature", type=float)


def _cache_options(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--cache", required=required, help="append-only valuation cache (JSONL)")
    p.add_argument("--strict-cache", action="store_true",
                   help="key entries by judge fingerprint as well")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="belnap", description="Bilateral judge valuations and paraconsistent formula evaluation."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--manifest", help="write a run manifest here")
        return p

    modes = [m.value for m in QuantifierMode]

    p = add("eval-formula", cmd_eval_formula, "evaluate a formula under an interpretation")
    p.add_argument("formula")
    p.add_argument("--interp", metavar="TABLE", help="atom table file; otherwise the judge grounds atoms")
    p.add_argument("--templates", help="relation verbalization templates (JSON)")
    p.add_argument("--constants", help="extra domain constants, comma or space separated")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--mode", choices=modes, default=DEFAULT_MODE.value)
    p.add_argument("--format", choices=("text", "structured"), default="text")
    _judge_options(p)
    _cache_options(p)

    p = add("check-validity", cmd_check_validity, "decide truth-preserving validity")
    p.add_argument("conclusion")
    p.add_argument("-p", "--premise", action="append", help="a premise (';' separates several)")
    p.add_argument("--premises-file", help="premises, one per line or ';'-separated")
    p.add_argument("--constants", help="extra domain constants")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max assignments to enumerate")
    p.add_argument("--mode", choices=modes, default=DEFAULT_MODE.value)
    p.add_argument("--format", choices=("text", "structured"), default="text")

    p = add("judge", cmd_judge, "run the judge over a QA dataset")
    p.add_argument("dataset")
    p.add_argument("--mode", choices=("bilateral", "unilateral"), default="bilateral")
    p.add_argument("--out", default="records.jsonl")
    p.add_argument("--workers", type=int, default=4)
    _judge_options(p)
    _cache_options(p)

    p = add("report", cmd_report, "metrics tables for a records file")
    p.add_argument("records")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resamples", type=int, default=1000)
    p.add_argument("--subsample", type=int, default=100)
    p.add_argument("--label", default="judge")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--out")

    p = add("negatives", cmd_negatives, "generate gold-false items from a dataset")
    p.add_argument("dataset")
    p.add_argument("--out", required=True)
    _judge_options(p)

    cache = sub.add_parser("cache", help="inspect or export a valuation cache")
    csub = cache.add_subparsers(dest="cache_command", required=True)
    p = csub.add_parser("inspect")
    p.set_defaults(func=cmd_cache_inspect, manifest=None)
    p.add_argument("cache")
    p.add_argument("--key")
    p.add_argument("--strict-cache", action="store_true")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p = csub.add_parser("export")
    p.set_defaults(func=cmd_cache_export)
    p.add_argument("cache")
    p.add_argument("--format", choices=("jsonl", "table"), default="jsonl")
    p.add_argument("--out")
    p.add_argument("--manifest")
    p.add_argument("--strict-cache", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CommandError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except UnknownAtomError as exc:
        sys.stderr.write(f"error: no valuation for atom {exc.args[0] if exc.args else exc}\n")
        return EXIT_UNKNOWN_ATOM
    except (EvaluatorError, BackendError, TemplateError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BACKEND
    except ConfigError as exc:
        sys.stderr.write(f"error: config: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

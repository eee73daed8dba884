import json
from itertools import product

import httpx
import pytest
from hypothesis import given, strategies as st

from belnap.judge import (
    BackendError,
    ChatCompletionBackend,
    ChatRequest,
    ConfigError,
    Judge,
    JudgeConfig,
    MockBackend,
    QAItem,
    RelationTemplate,
    TemplateError,
    load_config,
    majority,
    parse_conclusion,
    prompt_slots,
    render,
    template_for,
    verbalize,
)
from belnap.judge.templates import ALL_TEMPLATES, load_template, negative_generation_instructions
from belnap.syntax import parse_formula
from belnap.truth import E, F, GTV, T
from conftest import DATA, GOLDEN

VER = ("VERIFIED", "CANNOT VERIFY")
REF = ("REFUTED", "CANNOT REFUTE")


# -- parsing -------------------------------------------------------------------


def test_parse_conclusion_cases():
    assert parse_conclusion("reasoning...\nVERIFIED", *VER) == T
    assert parse_conclusion("reasoning...\nCANNOT REFUTE", *REF) == F
    assert parse_conclusion("no conclusion here", *VER) == E
    assert parse_conclusion("", *VER) == E
    assert parse_conclusion("VERIFIED", *VER) == T
    # a bare substring is enough when the last line is not a marker
    assert parse_conclusion("... the Americas. CANNOT VERIFY", *VER) == F
    assert parse_conclusion("It was VERIFIED by sources.\nDone.", *VER) == T


def test_final_line_beats_body_mentions():
    text = "I could say CANNOT VERIFY, but the evidence is clear.\nVERIFIED"
    assert parse_conclusion(text, *VER) == T
    text = "The claim looks VERIFIED at first.\n  CANNOT VERIFY  \n"
    assert parse_conclusion(text, *VER) == F


def test_case_sensitivity_and_lenient_flag():
    assert parse_conclusion("verified", *VER) == E
    assert parse_conclusion("verified", *VER, lenient=True) == T
    assert parse_conclusion("Cannot verify", *VER, lenient=True) == F


body_text = st.text(alphabet=st.sampled_from(list("abc VERIFDCANOT\n.")), max_size=80)


@given(body=body_text, extra=st.sampled_from(["", "VERIFIED", "CANNOT VERIFY", "VERIFIED CANNOT VERIFY"]))
def test_negative_final_line_never_reads_as_positive(body, extra):
    raw = f"{body}\n{extra}\nCANNOT VERIFY\n"
    assert parse_conclusion(raw, *VER) == F
    assert parse_conclusion(raw, *VER, lenient=True) == F


@given(st.text(max_size=200))
def test_parse_is_total(raw):
    assert parse_conclusion(raw, *VER) in (T, E, F)
    assert parse_conclusion(raw, *REF) in (T, E, F)


def test_majority_over_all_27_outcomes():
    for combo in product((T, E, F), repeat=3):
        counts = {v: combo.count(v) for v in (T, E, F)}
        winners = [v for v, n in counts.items() if n >= 2]
        assert majority(list(combo)) == (winners[0] if winners else E)
    assert majority([T, T, F]) == T
    assert majority([T, F, E]) == E
    assert majority([F, F, F]) == F
    assert majority([T, F]) == E
    assert majority([]) == E


# -- templates -----------------------------------------------------------------


@pytest.mark.parametrize("name", ALL_TEMPLATES)
def test_templates_are_byte_identical_to_golden(name):
    golden = (GOLDEN / f"{name}.txt").read_bytes()
    assert load_template(name).encode("utf-8") == golden


@pytest.mark.parametrize("name", [n for n in ALL_TEMPLATES if n != "negative_generation"])
def test_rendering_touches_only_the_two_slots(name):
    golden = (GOLDEN / f"{name}.txt").read_text(encoding="utf-8")
    q, a = "Who wrote {answer}?", "Ben {question} Jonson"
    out = render(load_template(name), q, a)
    assert out == golden.replace("{question}", "\0Q").replace("{answer}", "\0A") \
        .replace("\0Q", q).replace("\0A", a)
    assert out.count(q) == golden.count("{question}") == 1


def test_template_lookup():
    assert template_for("direct", "verification") == load_template("direct_verification")
    assert template_for("few_shot", "unilateral") == load_template("unilateral_few_shot")
    with pytest.raises(ValueError):
        template_for("chain", "verification")
    assert "{{" not in negative_generation_instructions()
    assert '"negative_answers"' in negative_generation_instructions()


# -- verbalization -------------------------------------------------------------


def test_verbalize_atoms():
    atom = parse_formula("yearOfDiscovery(America,1492)")
    tpl = {"yearOfDiscovery": "{1} was discovered in {2}"}
    assert verbalize(atom, tpl) == "America was discovered in 1492"
    assert verbalize(atom, tpl) == verbalize(atom, tpl)
    assert verbalize(parse_formula("bird(penguin)"), {"bird": "{1}s are birds"}) == "Penguins are birds"
    with pytest.raises(TemplateError):
        verbalize(parse_formula("flies(penguin)"), {"bird": "{1}s are birds"})
    with pytest.raises(TemplateError):
        verbalize(parse_formula("bird(penguin)"), {"bird": "{2} are birds"})


def test_prompt_slots_for_atoms_and_items():
    q, a = prompt_slots(parse_formula("bird(penguin)"), {"bird": RelationTemplate("{1}s are birds")})
    assert "Penguins are birds" in q and a == "Yes"
    custom = RelationTemplate("{1}s are birds", question="Are {1}s birds?", answer="{statement}.")
    assert prompt_slots(parse_formula("bird(penguin)"), {"bird": custom}) == (
        "Are penguins birds?", "Penguins are birds.")
    item = QAItem("i1", "Q?", "A", True)
    assert prompt_slots(item) == ("Q?", "A")


def test_qa_item_validation():
    with pytest.raises(ValueError):
        QAItem("", "q", "a", True)
    with pytest.raises(ValueError):
        QAItem("x", " ", "a", True)


# -- zeta with the mock backend ------------------------------------------------


def america_judge():
    return Judge(
        JudgeConfig(),
        MockBackend.from_file(DATA / "america_mock.json"),
        json.loads((DATA / "america_templates.json").read_text()),
    )


def test_america_transcripts_yield_ff():
    judge = america_judge()
    result = judge.zeta(parse_formula("yearOfDiscovery(America,1492)"))
    assert result.gtv == GTV(F, F)
    assert judge.backend.calls == 6
    assert "CANNOT VERIFY" in result.verification_transcript
    assert "America was discovered in 1492" in result.verification.transcripts[0].prompt


def test_penguin_atoms():
    judge = Judge(
        JudgeConfig(),
        MockBackend.from_file(DATA / "penguin_mock.json"),
        json.loads((DATA / "penguin_templates.json").read_text()),
    )
    assert judge.zeta(parse_formula("bird(penguin)")).gtv == GTV(T, F)
    assert judge.zeta(parse_formula("flies(penguin)")).gtv == GTV(F, T)


def test_zeta_is_deterministic_under_mock():
    a, b = america_judge(), america_judge()
    atom = parse_formula("yearOfDiscovery(America,1492)")
    ra, rb = a.zeta(atom), b.zeta(atom)
    assert ra.gtv == rb.gtv
    assert ra.verification_transcript == rb.verification_transcript
    assert ra.meta == rb.meta


def test_majority_per_side_and_failure_degradation():
    script = {"items": {
        "mixed": {"verification": ["VERIFIED", "CANNOT VERIFY", "VERIFIED"],
                  "refutation": ["REFUTED", "hmm", "CANNOT REFUTE"]},
        "down": {"verification": None, "refutation": None},
        "half": {"verification": [None, "VERIFIED", "VERIFIED"], "refutation": "CANNOT REFUTE"},
    }}
    judge = Judge(JudgeConfig(), MockBackend(script))
    assert judge.zeta(QAItem("mixed", "q", "a", True)).gtv == GTV(T, E)
    down = judge.zeta(QAItem("down", "q", "a", True))
    assert down.gtv == GTV(E, E)
    assert all(t.error for t in down.verification.transcripts)
    assert judge.zeta(QAItem("half", "q", "a", True)).gtv == GTV(T, F)


@given(st.lists(st.text(max_size=60), min_size=1, max_size=3), st.lists(st.text(max_size=60), min_size=1, max_size=3))
def test_zeta_is_total_on_arbitrary_outputs(ver, ref):
    judge = Judge(JudgeConfig(max_in_flight=1), MockBackend({"default": {"verification": ver, "refutation": ref}}))
    gtv = judge.zeta(QAItem("x", "q", "a", True)).gtv
    assert gtv.u in (T, E, F) and gtv.v in (T, E, F)


def test_unilateral_majority():
    script = {"items": {"a": {"unilateral": ["FALSE", "TRUE", "FALSE"]},
                        "b": {"verdict": "t"}, "c": {"unilateral": None}}}
    judge = Judge(JudgeConfig(), MockBackend(script))
    assert judge.unilateral(QAItem("a", "q", "x", True)).value == F
    assert judge.unilateral(QAItem("b", "q", "x", True)).value == T
    assert judge.unilateral(QAItem("c", "q", "x", True)).value == E


def test_token_accounting():
    judge = Judge(JudgeConfig(samples_per_side=1), MockBackend({"default": {"gtv": "tf"}}))
    res = judge.zeta(QAItem("x", "q", "a", True))
    t = res.verification.transcripts[0]
    assert t.tokens_estimated
    assert t.tokens == -(-(len(t.prompt) + len(t.raw_output)) // 4)


# -- HTTP backend --------------------------------------------------------------


def http_backend(handler, **cfg):
    config = JudgeConfig(base_url="http://judge.test/v1", model="m", max_retries=2, **cfg)
    client = httpx.Client(transport=httpx.MockTransport(handler))
    return ChatCompletionBackend(config, client=client, backoff=0.0)


def test_http_backend_success_reports_usage():
    seen = {}

    def handler(request):
        seen["url"] = str(request.url)
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={
            "choices": [{"message": {"content": "ok\nVERIFIED"}}],
            "usage": {"total_tokens": 42},
        })

    backend = http_backend(handler)
    out = backend.complete(ChatRequest("hello", temperature=0.1))
    assert out.text == "ok\nVERIFIED" and out.total_tokens == 42
    assert seen["url"] == "http://judge.test/v1/chat/completions"
    assert seen["body"] == {"model": "m", "messages": [{"role": "user", "content": "hello"}],
                            "temperature": 0.1}


def test_http_backend_retries_then_succeeds():
    attempts = []

    def handler(request):
        attempts.append(1)
        if len(attempts) < 3:
            return httpx.Response(503)
        return httpx.Response(200, json={"choices": [{"message": {"content": "REFUTED"}}]})

    backend = http_backend(handler)
    assert backend.complete(ChatRequest("x")).text == "REFUTED"
    assert len(attempts) == 3


def test_http_backend_gives_up():
    def handler(request):
        raise httpx.ConnectError("refused")

    backend = http_backend(handler)
    with pytest.raises(BackendError):
        backend.complete(ChatRequest("x"))
    assert backend.calls == 3


def test_http_backend_bad_payload_is_not_retried():
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(200, json={"nope": 1})

    with pytest.raises(BackendError):
        http_backend(handler).complete(ChatRequest("x"))
    assert len(calls) == 1


def test_judge_over_http_uses_usage_tokens():
    def handler(request):
        return httpx.Response(200, json={"choices": [{"message": {"content": "VERIFIED"}}],
                                         "usage": {"total_tokens": 10}})

    judge = Judge(JudgeConfig(samples_per_side=3), http_backend(handler))
    res = judge.zeta(QAItem("x", "q", "a", True))
    assert res.tokens == 60 and not res.meta["tokens_estimated"]


# -- config --------------------------------------------------------------------


def test_config_precedence(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"base_url": "http://file", "model": "file-model", "samples_per_side": 5}))
    env = {"BELNAP_BASE_URL": "http://env", "BELNAP_MODEL": ""}
    cfg = load_config(path, {"model": "flag-model", "temperature": None}, env)
    assert cfg.base_url == "http://env"
    assert cfg.model == "flag-model"
    assert cfg.samples_per_side == 5
    assert cfg.temperature == 0.1


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        JudgeConfig(samples_per_side=0)
    with pytest.raises(ConfigError):
        JudgeConfig(temperature=-1)
    with pytest.raises(ConfigError):
        load_config(None, {"colour": "red"}, {})
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigError):
        load_config(bad, None, {})


def test_fingerprint_tracks_verdict_relevant_fields():
    a = JudgeConfig(model="m")
    assert a.fingerprint() == JudgeConfig(model="m", timeout=5).fingerprint()
    assert a.fingerprint() != JudgeConfig(model="m", temperature=0.5).fingerprint()
    assert a.fingerprint() != JudgeConfig(model="n").fingerprint()

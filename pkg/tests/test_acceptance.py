"""Acceptance suite: one test per release criterion.

Run with ``pytest tests/test_acceptance.py``; a summary section prints one
PASS/FAIL line per criterion (see the hook in conftest.py).
"""
from __future__ import annotations

import json
import math
import time
from pathlib import Path
from random import Random

import pytest

from iga import mining
from iga.cli import main as cli_main
from iga.codec import assemble, decode_output, encode_inference, encode_training, parse_markup, substitute
from iga.generation import MockBackend, SamplingParams, top_k_filter
from iga.metrics import SpanEvalRecord, bleu_n, evaluate_dataset, ibleu, rouge2, self_bleu
from iga.mining import compile_idiom_pattern, load_marker_table
from iga.scoring import LexicalF1Scorer
from iga.sentences import split_sentences
from iga.tags import TagKind
from iga.tokens import tokenize

from tests.conftest import CORPUS_TAGS
from tests.test_metrics import FIXTURES, oracle_bleu

DATA = Path(__file__).parent / "data"


def _example(row) -> mining.MinedExample:
    return mining.MinedExample(
        id="golden",
        tag=TagKind(row["tag"]),
        context=row["context"],
        tagged_text=row["tagged_text"],
        answer_spans=tuple(row["answer_spans"]),
        source={},
        keywords=tuple(row["keywords"]),
    )


def test_codec_golden_files(codec_golden):
    """Training lines for all seven intent tags encode byte-exact and decode back."""
    start = time.perf_counter()
    rows = codec_golden["training_lines"]
    assert len(rows) == 7
    assert {r["tag"] for r in rows} == {t.value for t in TagKind} - {"MASK"}
    for row in rows:
        encoded = encode_training(_example(row))
        assert encoded == row["encoded"], row["tag"]
        parsed = parse_markup(row["tagged_text"])
        tail = encoded.split(" <sep> ", 1)[1]
        completion = decode_output(parsed, tail)
        assert list(completion.spans) == row["answer_spans"], row["tag"]
        assert not completion.truncated
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"codec golden check took {elapsed:.2f}s"


def test_mining_round_trip_on_mini_corpus(mini_corpus_docs, mined_examples):
    """Substituting answer spans back reproduces the source sentence, corpus-wide."""
    start = time.perf_counter()
    sentences_by_doc = {
        doc_id: [s.text for s in split_sentences(text)] for doc_id, text in mini_corpus_docs
    }
    assert len(sentences_by_doc) >= 200
    assert len(mined_examples) > 500
    checked = 0
    for ex in mined_examples:
        doc_id = ex.source["document"]
        sentence = sentences_by_doc[doc_id][ex.source["sentence"]]
        normalized_source = " ".join(t.surface for t in tokenize(sentence))
        rebuilt = substitute(parse_markup(ex.tagged_text), list(ex.answer_spans))
        assert rebuilt == normalized_source, ex.id
        checked += 1
    assert checked == len(mined_examples)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"round-trip check took {elapsed:.2f}s"


def test_table_decode_pairs(codec_golden):
    """Published input/output pairs reproduce exactly via parse + assemble."""
    pairs = codec_golden["decode_pairs"]
    assert {p["tag"] for p in pairs} >= {"CAUSE", "BIO"}
    for row in pairs:
        assert assemble(parse_markup(row["input"]), row["spans"]) == row["output"]


NEGATIVE_SENTENCES = [
    "The orchard sold apples of every color at the market.",
    "She kept an apple on the desk beside her eye drops.",
    "The apple cart tipped over near the east gate.",
    "His eye caught the apple stand across the square.",
    "They planted apple trees along the river last spring.",
    "An apple a day was her grandmother's advice.",
    "The eye of the storm passed north of the harbor.",
    "Apples and pears filled the wooden crates.",
    "The optician checked her eyes after the apple harvest.",
    "A stitch in the quilt came loose overnight.",
    "The surgeon placed six stitches above his eyebrow.",
    "The tailor stitched the hem in silence.",
    "Grandma's stitches were always perfectly even.",
    "The nurse removed the stitches on Friday.",
    "An iceberg drifted past the lighthouse at dawn.",
    "The tip of the pencil snapped during the exam.",
    "He left a generous tip for the waiter.",
    "Iceberg lettuce wilted in the afternoon heat.",
    "The weather turned cold under the gray sky.",
    "She felt fine despite the long journey.",
    "The cake recipe needed another piece of ginger.",
    "A piece of the puzzle slid under the table.",
    "He cut a piece of rope for the fence.",
    "The bullet train left the station on time.",
    "She bit into the warm bread happily.",
    "The blue moon festival drew a large crowd.",
    "Once the gates opened, the crowd surged in.",
    "The beans simmered on the stove for hours.",
    "He spilled coffee on the morning paper.",
    "The towel hung by the pool all afternoon.",
    "They threw the old couch into the skip.",
    "Her thunder echoed across the valley stage.",
    "The stolen painting resurfaced in a barn.",
    "The horse grazed near the mouth of the river.",
    "Word travels slowly in the mountain villages.",
    "His mouth watered at the smell of stew.",
    "The bridge swayed under the heavy cart.",
    "Water pooled under the broken gutter.",
    "The cows came home before the storm broke.",
    "The fence needed paint after the winter.",
    "A bird landed on the weather vane.",
    "The land beyond the dunes stayed wild.",
    "The clock tower chimed nine times.",
    "Nine yards of ribbon wrapped the maypole.",
    "The whole village gathered for the auction.",
    "His boots sank into the wet sand.",
    "The miller ground the last sack of wheat.",
    "A cold wind rattled the shutters at night.",
    "The lantern flickered twice and went out.",
    "Rain drummed on the tin roof until morning.",
]

POSSESSIVE_PRONOUNS = ["my", "your", "his", "her", "its", "our", "their"]


def test_marker_resources_and_idiom_patterns():
    """Bundled tables carry the documented counts; possessive matching is exact."""
    assert len(load_marker_table(TagKind.CAUSE).markers) == 16
    assert len(load_marker_table(TagKind.EFFECT).markers) == 15
    assert len(load_marker_table(TagKind.CNTRA).markers) == 31 + 6

    apple = compile_idiom_pattern("apple of one's eye")
    for pronoun in POSSESSIVE_PRONOUNS:
        assert apple.pattern.search(f"she was the apple of {pronoun} eye"), pronoun
    assert apple.pattern.search("the apple of John's eye")
    assert apple.pattern.search("the apple of one's eye")

    suite = [
        apple,
        compile_idiom_pattern("in stitches"),
        compile_idiom_pattern("tip of the iceberg"),
        compile_idiom_pattern("a piece of cake"),
        compile_idiom_pattern("bite the bullet"),
        compile_idiom_pattern("once in a blue moon"),
        compile_idiom_pattern("spill the beans"),
        compile_idiom_pattern("throw in the towel"),
        compile_idiom_pattern("steal one's thunder"),
        compile_idiom_pattern("straight from the horse's mouth"),
        compile_idiom_pattern("the whole nine yards"),
        compile_idiom_pattern("until the cows come home"),
    ]
    assert len(NEGATIVE_SENTENCES) == 50
    false_hits = [
        (pattern.raw, sentence)
        for pattern in suite
        for sentence in NEGATIVE_SENTENCES
        if pattern.pattern.search(sentence)
    ]
    assert false_hits == []


def test_metric_oracles_and_schema():
    """Scores match a brute-force counting oracle; report schema matches the
    published table layouts (whose absolute values need the full fine-tune and
    are out of reach here)."""
    assert len(FIXTURES) == 20
    for candidate, references in FIXTURES:
        for n in (1, 2, 4):
            assert bleu_n(candidate, references, n=n) == pytest.approx(
                oracle_bleu(candidate, references, n), abs=1e-6
            )

    assert bleu_n(["a", "b", "c"], [["a", "b", "c"]], n=2) == 100.0
    assert rouge2(["x", "y", "z"], ["x", "y", "z"])["f1"] == 1.0
    assert self_bleu([["a", "b"], ["a", "b"]]) == 100.0
    identical = ["one", "two", "three"]
    assert ibleu(identical, identical, identical, alpha=0.8) == 60.0

    records = [
        SpanEvalRecord("e0", TagKind.IDIOM, ("in stitches",), ("in stitches",)),
        SpanEvalRecord("e1", TagKind.IDIOM, ("red tape",), ("red herring",)),
        SpanEvalRecord(
            "e2", TagKind.PARA, ("a fine day",), ("a fine day",), source_spans=("a nice day",)
        ),
        SpanEvalRecord(
            "e3", TagKind.PARA, ("b c d",), ("b c e",), source_spans=("b c f",)
        ),
    ]
    report = evaluate_dataset(records, scorer=LexicalF1Scorer())
    table3_columns = {"rouge2", "bleu2", "self_bleu", "mean_infilled_length"}
    for row in report.per_tag.values():
        assert table3_columns <= set(row)
    table4_columns = {"similarity", "bleu", "self_bleu", "ibleu"}
    assert table4_columns <= set(report.per_tag["PARA"])


def test_sampling_contract(dataset_dir, full_dataset):
    """Seeded draws stay inside the top-k support; the mock is byte-stable."""
    fixtures = [
        ({"a": 0.5, "b": 0.3, "c": 0.15, "d": 0.05}, 2),
        ({f"t{i}": 1 / 50 for i in range(50)}, 40),
        ({"x": 0.9, "y": 0.06, "z": 0.04}, 1),
    ]
    draws = 0
    rng = Random(123)
    for dist, k in fixtures:
        filtered = top_k_filter(dist, k)
        support = set(filtered)
        tokens = sorted(filtered)
        weights = [filtered[t] for t in tokens]
        while draws < (10_000 * (fixtures.index((dist, k)) + 1)) // len(fixtures):
            token = rng.choices(tokens, weights=weights, k=1)[0]
            assert token in support
            draws += 1
    assert draws >= 10_000

    backend = MockBackend.from_dataset(dataset_dir / "examples.jsonl")
    example = full_dataset[0]
    prompt = encode_inference(example.context or "", parse_markup(example.tagged_text))
    params = SamplingParams(seed=1234)
    baseline = json.dumps([s.text for s in backend.complete(prompt, params)]).encode()
    for _ in range(100):
        again = json.dumps([s.text for s in backend.complete(prompt, params)]).encode()
        assert again == baseline


def _scripted_session(client) -> tuple[str, int]:
    """Drives exactly 40 events: 14 generates, 10 accepts, 15 edits, 1 submit."""
    sid = client.post("/v1/sessions", json={"mode": "IGA"}).json()["session_id"]
    markups = [
        "It was raining <contrast> trees",
        "The mill closed <cause> money",
        "The dam failed <effect> road",
        "The night felt <description> quiet",
        "The plan was <idiom> from the start",
        "Keep going <mask> now",
        "<sub> the plan was simple . <sub>",
    ]
    events = 0
    accepts = 0
    edits = 0
    rng = Random(77)
    for i in range(14):
        markup = markups[i % len(markups)]
        body = client.post(
            f"/v1/sessions/{sid}/generate", json={"markup": markup, "seed": i}
        ).json()
        events += 1
        if accepts < 10:
            candidate = body["candidates"][i % len(body["candidates"])]
            response = client.post(
                f"/v1/sessions/{sid}/accept",
                json={"request_id": body["request_id"], "candidate_id": candidate["candidate_id"]},
            )
            main_text = response.json()["main_text"]
            events += 1
            accepts += 1
        if edits < 15:
            words = main_text.split(" ")
            pos = rng.randint(1, max(1, len(words) - 1))
            action = rng.random()
            if action < 0.4:
                words.insert(pos, f"note{edits}")
            elif action < 0.7 and len(words) > 3:
                words.pop(pos % len(words))
            else:
                words.append(f"tail{edits}.")
            main_text = " ".join(words)
            client.post(f"/v1/sessions/{sid}/edit", json={"main_text": main_text})
            events += 1
            edits += 1
    while edits < 15:
        main_text += f" closing{edits}."
        client.post(f"/v1/sessions/{sid}/edit", json={"main_text": main_text})
        events += 1
        edits += 1
    client.post(f"/v1/sessions/{sid}/submit")
    events += 1
    return sid, events


def test_event_sourcing_determinism(tmp_path, dataset_dir, capsys):
    """A scripted 40-event session replays byte-identically through the CLI."""
    from fastapi.testclient import TestClient

    from iga.service.app import ServiceConfig, create_app

    sessions = tmp_path / "sessions"
    app = create_app(
        ServiceConfig(data_dir=sessions, backend=f"mock:{dataset_dir / 'examples.jsonl'}")
    )
    with TestClient(app) as client:
        sid, events = _scripted_session(client)
        assert events == 40
        live = client.get(f"/v1/sessions/{sid}/report").content

        # unigram edge case: untouched span scores exactly 100/100/100
        sid2 = client.post("/v1/sessions", json={"mode": "IGA"}).json()["session_id"]
        body = client.post(
            f"/v1/sessions/{sid2}/generate",
            json={"markup": "It was raining <contrast> trees", "seed": 9},
        ).json()
        client.post(
            f"/v1/sessions/{sid2}/accept",
            json={"request_id": body["request_id"], "candidate_id": body["candidates"][0]["candidate_id"]},
        )
        untouched = client.get(f"/v1/sessions/{sid2}/report").json()
        row = untouched["per_tag_unigram"]["CNTRA"]
        assert (row["precision"], row["recall"], row["f1"]) == (100.0, 100.0, 100.0)

        # unigram edge case: fully deleted span scores precision 0
        client.post(f"/v1/sessions/{sid2}/edit", json={"main_text": "qqq www eee"})
        deleted = client.get(f"/v1/sessions/{sid2}/report").json()
        row = deleted["per_tag_unigram"]["CNTRA"]
        assert row["precision"] == 0.0
        assert row["fully_deleted"] == 1

    log_path = sessions / f"{sid}.jsonl"
    events_on_disk = [json.loads(line) for line in log_path.read_text().splitlines()[1:]]
    assert len(events_on_disk) == 40
    capsys.readouterr()
    assert cli_main(["replay", str(log_path)]) == 0
    replayed = capsys.readouterr().out.encode()
    assert replayed == live


def test_pipeline_determinism(tmp_path, mini_corpus_path):
    """`mine` with a fixed seed is byte-identical across runs and worker counts."""
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    base = [
        "mine",
        "--corpus", str(mini_corpus_path),
        "--tags", "cause,effect,contrast,descp,idiom",
        "--seed", "7",
    ]
    assert cli_main(base + ["--out", str(out1), "--workers", "1"]) == 0
    assert cli_main(base + ["--out", str(out2), "--workers", "3"]) == 0
    first = (out1 / "examples.jsonl").read_bytes()
    second = (out2 / "examples.jsonl").read_bytes()
    assert first == second
    assert len(first) > 0

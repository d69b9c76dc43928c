from __future__ import annotations

import json
from pathlib import Path

import pytest

from iga import mining
from iga.tags import TagKind

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def codec_golden() -> dict:
    return json.loads((DATA / "codec_golden.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def mini_corpus_path() -> Path:
    return DATA / "mini_corpus.jsonl"


@pytest.fixture(scope="session")
def mini_corpus_docs(mini_corpus_path) -> list[tuple[str, str]]:
    return mining.load_documents(mini_corpus_path)


CORPUS_TAGS = (TagKind.CAUSE, TagKind.EFFECT, TagKind.CNTRA, TagKind.DESCP, TagKind.IDIOM)


@pytest.fixture(scope="session")
def mined_examples(mini_corpus_docs) -> list[mining.MinedExample]:
    resources = mining.default_resources(CORPUS_TAGS)
    return mining.mine_documents(mini_corpus_docs, CORPUS_TAGS, resources, corpus="mini")


@pytest.fixture(scope="session")
def full_dataset(mined_examples) -> list[mining.MinedExample]:
    """Corpus-mined examples plus the BIO and rephrase fixtures."""
    from iga.lexicon import load_default_lexicon
    from iga.scoring import SidecarScorer

    examples = list(mined_examples)
    with open(DATA / "post_modifier_records.jsonl", encoding="utf-8") as fh:
        for line in fh:
            record = json.loads(line)
            ex = mining.convert_postmodifier(record)
            if ex is not None:
                examples.append(ex)
    lex = load_default_lexicon()
    scorer = SidecarScorer()
    with open(DATA / "para_pairs.tsv", encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            source, target, score = line.rstrip("\n").split("\t")
            ex = mining.build_para_example(
                {"source": source, "target": target, "score": float(score), "id": f"p{i}"},
                scorer,
                lex,
            )
            if ex is not None:
                examples.append(ex)
    examples.sort(key=lambda e: (e.id, e.tag.value))
    return examples


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory, full_dataset) -> Path:
    """On-disk dataset with train/dev/test splits, shared across tests."""
    root = tmp_path_factory.mktemp("dataset")
    mining.write_examples(root / "examples.jsonl", full_dataset)
    splits = mining.split_dataset(full_dataset, per_tag_dev=5, per_tag_test=5, seed=7)
    for name, part in splits.items():
        mining.write_examples(root / f"{name}.jsonl", part)
    return root


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion."""
    rows = []
    for status, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = str(getattr(report, "nodeid", ""))
            if "test_acceptance.py" in nodeid and getattr(report, "when", "call") in ("call", "setup"):
                rows.append((nodeid.split("::")[-1], verdict))
    if rows:
        terminalreporter.section("acceptance criteria")
        for name, verdict in sorted(set(rows)):
            terminalreporter.write_line(f"{verdict}  {name}")

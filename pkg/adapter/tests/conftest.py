from __future__ import annotations

import json
from pathlib import Path

import pytest

from lm_adapter.config import AdapterConfig
from lm_adapter.training import finetune

REPO_ROOT = Path(__file__).resolve().parents[2]
WIRE_FIXTURE = REPO_ROOT / "tests" / "data" / "wire_protocol.json"

SMOKE_LINES = [
    "the mill closed , <cause> money <cause> . <sep> because the <answer> ran out <answer>",
    "the dam failed . <effect> road <effect> . <sep> thus the <answer> was lost <answer>",
    "the night was quiet . <description> . <sep> calm and dark and still <answer>",
    "the coach had them <idiom> all night . <sep> in stitches <answer>",
    "<sub> the plan was simple . <sub> <sep> the scheme was straightforward . <answer>",
    "the castle stood , <contrast> tower <contrast> . <sep> but the <answer> fell <answer>",
    "prices rose , <cause> demand <cause> . <sep> because of <answer> spikes <answer>",
    "the road flooded . <effect> delays <effect> . <sep> hence the <answer> grew <answer>",
    "a calm <description> evening . <sep> remarkably gentle <answer>",
    "it felt like <idiom> to them . <sep> a piece of cake <answer>",
] * 3


@pytest.fixture(scope="session")
def wire_fixture() -> dict:
    return json.loads(WIRE_FIXTURE.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def smoke_config() -> AdapterConfig:
    return AdapterConfig(n_embd=32, n_layer=1, n_head=2, max_context=128, seed=3)


@pytest.fixture(scope="session")
def smoke_checkpoint(tmp_path_factory, smoke_config) -> Path:
    root = tmp_path_factory.mktemp("smoke")
    train_file = root / "train.txt"
    train_file.write_text("\n".join(SMOKE_LINES) + "\n", encoding="utf-8")
    return finetune(train_file, root / "ckpt", smoke_config)

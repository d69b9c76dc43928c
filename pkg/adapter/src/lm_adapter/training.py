"""Fine-tuning on exported training lines.

The objective is plain causal language modeling over whole lines (context,
tagged text, separator, spans, answer terminators), each capped with an
end-of-line token. The model is a small randomly initialized GPT-2-style
network over the word-level vocabulary; no pretrained weights are involved,
so this is a desk-scale reference, not a reproduction of the full setup.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from random import Random

import torch
from torch.nn.utils.rnn import pad_sequence
from transformers import GPT2Config, GPT2LMHeadModel

from .config import AdapterConfig
from .vocab import WordVocab, TrainingDataError, validate_tags

CHECKPOINT_NAME = "adapter.pt"


def build_model(vocab_size: int, config: AdapterConfig) -> GPT2LMHeadModel:
    model_config = GPT2Config(
        vocab_size=vocab_size,
        n_positions=config.max_context,
        n_embd=config.n_embd,
        n_layer=config.n_layer,
        n_head=config.n_head,
        bos_token_id=None,
        eos_token_id=None,
    )
    return GPT2LMHeadModel(model_config)


def read_training_lines(train_file: str | Path) -> list[str]:
    lines = [line.strip() for line in Path(train_file).read_text(encoding="utf-8").splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise TrainingDataError(f"{train_file}: no training lines")
    return lines


def finetune(train_file: str | Path, out_dir: str | Path, config: AdapterConfig | None = None) -> Path:
    """Train on the export file and write a loadable checkpoint.

    Returns the checkpoint path; training losses are stored alongside for
    inspection. Lines containing unregistered tag tokens abort with the
    offending line number.
    """
    config = config or AdapterConfig()
    lines = read_training_lines(train_file)
    validate_tags(lines, config.special_tokens)
    vocab = WordVocab.build(lines, config.special_tokens)

    encoded = []
    for line in lines:
        ids = vocab.encode(line)[: config.max_context - 1]
        encoded.append(torch.tensor(ids + [vocab.eol_id], dtype=torch.long))

    torch.manual_seed(config.seed)
    model = build_model(len(vocab), config).to(config.device)
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)

    order = list(range(len(encoded)))
    rng = Random(config.seed)
    losses: list[float] = []
    for _epoch in range(config.epochs):
        rng.shuffle(order)
        for start in range(0, len(order), config.batch_size):
            batch = [encoded[i] for i in order[start : start + config.batch_size]]
            input_ids = pad_sequence(batch, batch_first=True, padding_value=vocab.pad_id)
            input_ids = input_ids.to(config.device)
            attention = (input_ids != vocab.pad_id).long()
            labels = input_ids.masked_fill(input_ids == vocab.pad_id, -100)
            out = model(input_ids=input_ids, attention_mask=attention, labels=labels)
            optimizer.zero_grad()
            out.loss.backward()
            optimizer.step()
            losses.append(float(out.loss.item()))

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checkpoint = out_dir / CHECKPOINT_NAME
    torch.save(
        {
            "state_dict": model.state_dict(),
            "vocab_tokens": vocab.tokens,
            "config": asdict(config),
        },
        checkpoint,
    )
    (out_dir / "training.json").write_text(
        json.dumps(
            {
                "lines": len(lines),
                "steps": len(losses),
                "first_loss": losses[0],
                "last_loss": losses[-1],
                "initial_perplexity_bound": math.log(len(vocab)),
                "losses": losses,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return checkpoint


def load_checkpoint(path: str | Path) -> tuple[GPT2LMHeadModel, WordVocab, AdapterConfig]:
    payload = torch.load(Path(path), map_location="cpu", weights_only=False)
    config = AdapterConfig(**{
        k: tuple(v) if isinstance(v, list) else v for k, v in payload["config"].items()
    })
    vocab = WordVocab(payload["vocab_tokens"])
    model = build_model(len(vocab), config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, vocab, config

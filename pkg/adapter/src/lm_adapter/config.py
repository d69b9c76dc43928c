"""Adapter configuration: special tokens, model size, decoding limits."""
from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_SEP = "<sep>"
DEFAULT_ANSWER = "<answer>"
DEFAULT_TAGS = (
    "<sub>",
    "<paraphrase>",
    "<biography>",
    "<cause>",
    "<effect>",
    "<contrast>",
    "<concession>",
    "<description>",
    "<idiom>",
    "<mask>",
)
PAIRED_TAGS = ("<sub>", "<paraphrase>")


@dataclass
class AdapterConfig:
    sep_token: str = DEFAULT_SEP
    answer_token: str = DEFAULT_ANSWER
    tag_tokens: tuple[str, ...] = DEFAULT_TAGS
    device: str = "cpu"
    max_context: int = 384
    n_embd: int = 192
    n_layer: int = 2
    n_head: int = 4
    model_id: str = "lm-adapter"
    seed: int = 0
    epochs: int = 1
    batch_size: int = 8
    learning_rate: float = 3e-3

    @property
    def special_tokens(self) -> tuple[str, ...]:
        return (self.sep_token, self.answer_token, *self.tag_tokens)

from __future__ import annotations

import pytest

from iga.codec import (
    ANSWER_TOKEN,
    CodecError,
    MarkupError,
    TagSlot,
    assemble,
    decode_output,
    encode_inference,
    encode_training,
    parse_markup,
    prompt_token_count,
    substitute,
)
from iga.mining import MinedExample
from iga.tags import TagKind, UnknownTagError


def example_from(row: dict) -> MinedExample:
    return MinedExample(
        id="golden",
        tag=TagKind(row["tag"]),
        context=row["context"],
        tagged_text=row["tagged_text"],
        answer_spans=tuple(row["answer_spans"]),
        source={"corpus": "paper-appendix", "document": row["tag"]},
        keywords=tuple(row["keywords"]),
    )


def test_parse_plain_text_has_no_slots():
    parsed = parse_markup("Hello world")
    assert parsed.slot_count == 0
    assert len(parsed.segments) == 1


def test_parse_two_slot_markup():
    parsed = parse_markup("This is a really good book <cause> plot <cause> .")
    kinds = [type(s).__name__ for s in parsed.segments]
    assert kinds == ["LiteralText", "TagSlot", "LiteralText", "TagSlot", "LiteralText"]
    assert parsed.slot_count == 2
    assert all(s.kind is TagKind.CAUSE for s in parsed.segments if isinstance(s, TagSlot))


def test_parse_paired_rephrase_region():
    parsed = parse_markup("<paraphrase> X <paraphrase>")
    assert parsed.para_region == (0, 2)
    assert parsed.slot_count == 1


def test_parse_rejects_unknown_tag():
    with pytest.raises(UnknownTagError):
        parse_markup("some <bogus> tag")


def test_parse_rejects_reserved_tokens():
    with pytest.raises(MarkupError):
        parse_markup("text <sep> more")
    with pytest.raises(MarkupError):
        parse_markup("text <answer>")


def test_parse_rejects_unbalanced_rephrase():
    with pytest.raises(MarkupError):
        parse_markup("<sub> dangling")


def test_parse_rejects_tag_inside_rephrase():
    with pytest.raises(MarkupError):
        parse_markup("<sub> inner <cause> bad <sub>")


def test_parse_rejects_second_rephrase_region():
    with pytest.raises(MarkupError):
        parse_markup("<sub> a <sub> and <sub> b <sub>")


def test_mask_is_accepted():
    assert parse_markup("It was raining <mask> trees").slot_count == 1


def test_golden_training_lines(codec_golden):
    for row in codec_golden["training_lines"]:
        assert encode_training(example_from(row)) == row["encoded"]


def test_golden_decode_tail(codec_golden):
    for row in codec_golden["training_lines"]:
        parsed = parse_markup(row["tagged_text"])
        tail = row["encoded"].split(" <sep> ", 1)[1]
        completion = decode_output(parsed, tail)
        assert list(completion.spans) == row["answer_spans"]
        assert not completion.truncated


def test_encode_training_rejects_span_mismatch(codec_golden):
    row = dict(codec_golden["training_lines"][2])
    row["answer_spans"] = row["answer_spans"][:1]
    with pytest.raises(CodecError):
        encode_training(example_from(row))


def test_table_decode_pairs(codec_golden):
    for row in codec_golden["decode_pairs"]:
        parsed = parse_markup(row["input"])
        assert assemble(parsed, row["spans"]) == row["output"]


def test_inference_prompt(codec_golden):
    fixture = codec_golden["inference_prompt"]
    prompt = encode_inference("", parse_markup(fixture["input"]))
    assert prompt.text == fixture["prompt"]


def test_inference_truncation_drops_oldest_context():
    context = " ".join(f"w{i}" for i in range(400))
    tagged = parse_markup("one two three <cause> four five six <cause> end here now ok")
    # tagged render counts 12 tokens; budget 300 keeps the last 288 context tokens
    prompt = encode_inference(context, tagged, budget=300)
    assert prompt.token_budget_used == 300
    assert prompt.text.startswith("w112 ")
    assert prompt.text.endswith(" <sep>")


def test_inference_rejects_oversized_tagged_text():
    tagged = parse_markup("<cause> " + " ".join(f"w{i}" for i in range(400)))
    with pytest.raises(CodecError):
        encode_inference("", tagged, budget=300)


def test_inference_requires_a_slot():
    with pytest.raises(CodecError):
        encode_inference("ctx", parse_markup("no tags here"))


def test_decode_empty_raw_is_truncated():
    parsed = parse_markup("a <cause> b")
    completion = decode_output(parsed, "")
    assert completion.spans == ()
    assert completion.truncated


def test_decode_extra_pieces_discarded_with_warning():
    parsed = parse_markup("a <cause> b <cause> c")
    raw = f"one {ANSWER_TOKEN} two {ANSWER_TOKEN} three {ANSWER_TOKEN}"
    completion = decode_output(parsed, raw)
    assert completion.spans == ("one", "two")
    assert completion.warnings


def test_decode_unterminated_tail_is_truncated():
    parsed = parse_markup("a <cause> b <cause> c")
    completion = decode_output(parsed, "one <answer> partial tail")
    assert completion.spans == ("one", "partial tail")
    assert completion.truncated


def test_assemble_drops_empty_spans():
    parsed = parse_markup("It was raining <contrast> trees")
    assert assemble(parsed, [""]) == "It was raining trees"


def test_assemble_rejects_surplus_spans():
    parsed = parse_markup("only <cause> one")
    with pytest.raises(CodecError):
        assemble(parsed, ["a", "b"])


def test_substitute_is_raw():
    parsed = parse_markup("operators , <cause> increasing <cause> email .")
    text = substitute(parsed, ["because", "numbers will not use"])
    assert text == "operators , because increasing numbers will not use email ."


def test_rephrase_substitution_replaces_whole_region():
    parsed = parse_markup("<sub> the old wording . <sub>")
    assert substitute(parsed, ["The brand new wording ."]) == "The brand new wording ."


def test_prompt_token_count_tags_are_single_tokens():
    assert prompt_token_count("a <cause> b.") == 4


def test_reparse_consistency_on_mined_examples(mined_examples):
    for ex in mined_examples[:200]:
        parsed = parse_markup(ex.tagged_text)
        assert parsed.slot_count == len(ex.answer_spans)


def test_codec_round_trip_on_every_dataset_record(full_dataset):
    for ex in full_dataset:
        line = encode_training(ex)
        parsed = parse_markup(ex.tagged_text)
        tail = line.split(" <sep> ", 1)[1]
        completion = decode_output(parsed, tail)
        assert list(completion.spans) == list(ex.answer_spans), ex.id
        assert not completion.truncated

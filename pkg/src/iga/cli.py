"""Command line entry point.

Subcommands cover the pipeline end to end: mine a corpus, split a dataset,
compute stats, export training lines, batch-generate against a backend,
evaluate span predictions, serve the interactive API, and replay session
logs offline. All outputs are written atomically; data goes to files or
stdout, logs to stderr. Exit codes: 0 success, 1 validation error, 2
runtime error.
"""
from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from . import mining
from .codec import CodecError, MarkupError, decode_output, encode_inference, encode_training, parse_markup
from .generation import BackendError, SamplingParams, make_backend
from .lexicon import FrequencyLexicon, load_default_lexicon
from .metrics import SpanEvalRecord, evaluate_dataset
from .mining import DatasetError, MiningConfig, atomic_write_text
from .reporting import (
    canonical_json,
    metrics_text,
    metrics_tsv,
    render_metrics_figure,
    render_session_figure,
    render_stats_figure,
    session_tsv,
    stats_tsv,
)
from .scoring import make_scorer
from .tags import TagKind, UnknownTagError

log = logging.getLogger("iga")

_MINEABLE = {
    "cause": TagKind.CAUSE,
    "effect": TagKind.EFFECT,
    "contrast": TagKind.CNTRA,
    "cntra": TagKind.CNTRA,
    "descp": TagKind.DESCP,
    "description": TagKind.DESCP,
    "idiom": TagKind.IDIOM,
    "para": TagKind.PARA,
    "bio": TagKind.BIO,
}


@click.group()
@click.option("--verbose", is_flag=True, help="Log debug detail to stderr.")
def cli(verbose: bool):
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _parse_tags(spec: str) -> list[TagKind]:
    kinds: list[TagKind] = []
    for raw in spec.split(","):
        raw = raw.strip().lower()
        if not raw:
            continue
        if raw not in _MINEABLE:
            raise click.UsageError(f"unknown tag {raw!r}; choose from {', '.join(sorted(_MINEABLE))}")
        kind = _MINEABLE[raw]
        if kind not in kinds:
            kinds.append(kind)
    if not kinds:
        raise click.UsageError("no tags selected")
    return kinds


def _load_lexicon(path: str | None) -> FrequencyLexicon:
    return FrequencyLexicon.load(path) if path else load_default_lexicon()


@cli.command()
@click.option("--corpus", type=click.Path(exists=True), help="Corpus dir, .txt file or JSONL of {id, text}.")
@click.option("--tags", default="cause,effect,contrast,descp,idiom", show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--workers", default=1, show_default=True, type=int)
@click.option("--pairs", type=click.Path(exists=True), help="Rephrase pairs TSV: source<TAB>target[<TAB>score].")
@click.option("--post-modifiers", type=click.Path(exists=True), help="Post-modifier records JSONL.")
@click.option("--scorer", default="lexical-f1", show_default=True)
@click.option("--lexicon", type=click.Path(exists=True), help="Frequency lexicon TSV override.")
@click.option("--max-keywords", default=2, show_default=True, type=int)
def mine(corpus, tags, out, seed, workers, pairs, post_modifiers, scorer, lexicon, max_keywords):
    """Mine tag-labeled infilling examples from raw inputs."""
    del seed  # mining is deterministic; the seed only matters for `split`
    kinds = _parse_tags(tags)
    config = MiningConfig(max_keywords=max_keywords)
    lex = _load_lexicon(lexicon)
    examples: list[mining.MinedExample] = []

    corpus_kinds = [k for k in kinds if k not in (TagKind.PARA, TagKind.BIO)]
    if corpus_kinds:
        if not corpus:
            raise click.UsageError("--corpus is required for marker/descriptive/idiom tags")
        docs = mining.load_documents(corpus)
        resources = mining.default_resources(corpus_kinds, config, lex)
        examples.extend(
            mining.mine_documents(docs, corpus_kinds, resources, corpus=Path(corpus).stem, workers=workers)
        )
    if TagKind.BIO in kinds:
        if not post_modifiers:
            raise click.UsageError("--post-modifiers is required to mine biography examples")
        examples.extend(_mine_post_modifiers(Path(post_modifiers), config))
    if TagKind.PARA in kinds:
        if not pairs:
            raise click.UsageError("--pairs is required to mine rephrase examples")
        examples.extend(_mine_pairs(Path(pairs), make_scorer(scorer), lex, config))

    examples.sort(key=lambda e: (e.id, e.tag.value))
    out_dir = Path(out)
    mining.write_examples(out_dir / "examples.jsonl", examples)
    log.info("mined %d examples -> %s", len(examples), out_dir / "examples.jsonl")
    click.echo(f"{len(examples)} examples")


def _mine_post_modifiers(path: Path, config: MiningConfig):
    import json

    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON") from exc
            record.setdefault("id", f"line{lineno}")
            prov = mining._DocContext(path.stem, str(record["id"]))
            ex = mining.convert_postmodifier(record, config, prov)
            if ex is not None:
                out.append(ex)
    return out


def _mine_pairs(path: Path, scorer, lex, config: MiningConfig):
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise DatasetError(f"{path}:{lineno}: expected source<TAB>target[<TAB>score]")
            pair = {"source": cols[0], "target": cols[1], "id": f"line{lineno}"}
            if len(cols) > 2 and cols[2].strip():
                pair["score"] = float(cols[2])
            prov = mining._DocContext(path.stem, pair["id"])
            ex = mining.build_para_example(pair, scorer, lex, config, prov)
            if ex is not None:
                out.append(ex)
    return out


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True), help="Dataset dir or examples.jsonl.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--dev", default=500, show_default=True, type=int)
@click.option("--test", "test_", default=500, show_default=True, type=int)
@click.option("--out", type=click.Path(), help="Output dir (defaults to the data dir).")
def split(data, seed, dev, test_, out):
    """Deterministic per-tag train/dev/test split."""
    data_path = Path(data)
    source = data_path / "examples.jsonl" if data_path.is_dir() else data_path
    examples = mining.read_examples(source)
    splits = mining.split_dataset(examples, per_tag_dev=dev, per_tag_test=test_, seed=seed)
    out_dir = Path(out) if out else (data_path if data_path.is_dir() else data_path.parent)
    for name, part in splits.items():
        mining.write_examples(out_dir / f"{name}.jsonl", part)
    click.echo(" ".join(f"{name}:{len(part)}" for name, part in splits.items()))


def _load_splits(data_dir: Path) -> dict[str, list]:
    splits = {}
    for name in ("train", "dev", "test"):
        path = data_dir / f"{name}.jsonl"
        if path.exists():
            splits[name] = mining.read_examples(path)
    if not splits:
        path = data_dir / "examples.jsonl"
        splits["all"] = mining.read_examples(path) if path.exists() else []
    return splits


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--out", type=click.Path(), help="Also write stats.json/.tsv/.png here.")
def stats(data, out):
    """Dataset statistics: per-tag counts, token total, mean length."""
    result = mining.compute_stats(_load_splits(Path(data)))
    payload = canonical_json(result.to_dict())
    if out:
        out_dir = Path(out)
        atomic_write_text(out_dir / "stats.json", payload)
        atomic_write_text(out_dir / "stats.tsv", stats_tsv(result))
        render_stats_figure(result, out_dir / "stats.png")
        log.info("wrote stats.json, stats.tsv, stats.png -> %s", out_dir)
    click.echo(payload, nl=False)


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True), help="Examples JSONL.")
@click.option("--out", required=True, type=click.Path(), help="Training-line export file.")
def encode(data, out):
    """Export fine-tuning lines (one encoded example per line)."""
    examples = mining.read_examples(Path(data))
    lines = [encode_training(ex) for ex in examples]
    atomic_write_text(Path(out), "\n".join(lines) + ("\n" if lines else ""))
    click.echo(f"{len(lines)} lines")


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True), help="Examples JSONL with gold spans.")
@click.option("--backend", required=True, help="Backend spec: mock:<dataset.jsonl> or a base URL.")
@click.option("--out", required=True, type=click.Path(), help="Span-eval records JSONL.")
@click.option("--num-samples", default=1, show_default=True, type=int)
@click.option("--seed", type=int)
@click.option("--budget", default=300, show_default=True, type=int)
def generate(data, backend, out, num_samples, seed, budget):
    """Batch-generate spans for a dataset shard (first sample per example)."""
    import json

    examples = mining.read_examples(Path(data))
    be = make_backend(backend)
    rows = []
    for ex in examples:
        parsed = parse_markup(ex.tagged_text)
        prompt = encode_inference(ex.context or "", parsed, budget)
        params = SamplingParams(num_samples=num_samples, seed=seed)
        samples = be.complete(prompt, params)
        completion = decode_output(parsed, samples[0].text)
        record = SpanEvalRecord(
            example_id=ex.id,
            tag=ex.tag,
            generated_spans=completion.spans,
            reference_spans=tuple(ex.answer_spans),
            source_spans=_para_source(ex),
            truncated=completion.truncated,
        )
        rows.append(json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True))
    atomic_write_text(Path(out), "\n".join(rows) + ("\n" if rows else ""))
    click.echo(f"{len(rows)} records")


def _para_source(ex) -> tuple[str, ...] | None:
    if ex.tag is not TagKind.PARA:
        return None
    parsed = parse_markup(ex.tagged_text)
    if parsed.para_region is None:
        return None
    inner = parsed.segments[parsed.para_region[0] + 1 : parsed.para_region[1]]
    return tuple(seg.text for seg in inner if hasattr(seg, "text"))


@cli.command("eval")
@click.option("--pred", required=True, type=click.Path(exists=True), help="Predictions JSONL.")
@click.option("--gold", required=True, type=click.Path(exists=True), help="Gold examples JSONL.")
@click.option("--out", type=click.Path(), help="Also write metrics.json/.tsv/.txt/.png here.")
@click.option("--scorer", default="lexical-f1", show_default=True)
def eval_cmd(pred, gold, out, scorer):
    """Evaluate generated spans against gold answer spans."""
    import json

    gold_examples = {ex.id: ex for ex in mining.read_examples(Path(gold))}
    records = []
    with open(pred, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{pred}:{lineno}: invalid JSON") from exc
            example_id = str(data.get("example_id") or data.get("id") or "")
            gold_ex = gold_examples.get(example_id)
            if gold_ex is None:
                raise DatasetError(f"{pred}:{lineno}: no gold example with id {example_id!r}")
            records.append(
                SpanEvalRecord(
                    example_id=example_id,
                    tag=gold_ex.tag,
                    generated_spans=tuple(data.get("generated_spans") or data.get("spans") or ()),
                    reference_spans=tuple(gold_ex.answer_spans),
                    source_spans=_para_source(gold_ex),
                    truncated=bool(data.get("truncated", False)),
                )
            )
    report = evaluate_dataset(records, scorer=make_scorer(scorer))
    payload = canonical_json(report.to_dict())
    if out:
        out_dir = Path(out)
        atomic_write_text(out_dir / "metrics.json", payload)
        atomic_write_text(out_dir / "metrics.tsv", metrics_tsv(report))
        atomic_write_text(out_dir / "metrics.txt", metrics_text(report))
        render_metrics_figure(report, out_dir / "metrics.png")
        log.info("wrote metrics.json, metrics.tsv, metrics.txt, metrics.png -> %s", out_dir)
    click.echo(payload, nl=False)


@cli.command()
@click.option("--backend", required=True, help="Backend spec: mock:<dataset.jsonl> or a base URL.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8040, show_default=True, type=int)
@click.option("--data-dir", default="sessions", show_default=True, type=click.Path())
@click.option("--budget", default=300, show_default=True, type=int)
@click.option("--num-samples", default=3, show_default=True, type=int)
@click.option("--mask-backend", help="Optional separate backend spec for the mask tag.")
def serve(backend, host, port, data_dir, budget, num_samples, mask_backend):
    """Run the interactive authoring service."""
    import uvicorn

    from .service.app import ServiceConfig, create_app

    tag_backends = {"MASK": mask_backend} if mask_backend else {}
    app = create_app(
        ServiceConfig(
            data_dir=Path(data_dir),
            backend=backend,
            token_budget=budget,
            default_num_samples=num_samples,
            tag_backends=tag_backends,
        )
    )
    uvicorn.run(app, host=host, port=port, log_level="info")


@cli.command()
@click.argument("session_log", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), help="Also write report.json/.tsv/.png here.")
def replay(session_log, out):
    """Recompute a session report offline from its event log."""
    from .service.state import build_report, canonical_report_json, replay_events
    from .service.store import read_log

    header, events = read_log(Path(session_log))
    report = build_report(replay_events(header, events))
    payload = canonical_report_json(report)
    if out:
        out_dir = Path(out)
        atomic_write_text(out_dir / "report.json", payload)
        atomic_write_text(out_dir / "report.tsv", session_tsv(report))
        render_session_figure(report, out_dir / "report.png")
        log.info("wrote report.json, report.tsv, report.png -> %s", out_dir)
    click.echo(payload, nl=False)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False, auto_envvar_prefix="IGA")
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except (DatasetError, MarkupError, CodecError, UnknownTagError, ValueError) as exc:
        log.error("%s", exc)
        return 1
    except BackendError as exc:
        log.error("backend failure: %s", exc)
        return 2
    except click.Abort:
        return 1
    except Exception as exc:  # runtime failures map to exit code 2
        log.error("unexpected failure: %s", exc, exc_info=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())

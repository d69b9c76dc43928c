"""lm-adapter command line: finetune a checkpoint, serve the wire protocol."""
from __future__ import annotations

import sys

import click

from .config import AdapterConfig
from .vocab import TrainingDataError


@click.group()
def cli():
    pass


@cli.command()
@click.option("--train", "train_file", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--epochs", default=1, show_default=True, type=int)
@click.option("--batch-size", default=8, show_default=True, type=int)
@click.option("--learning-rate", default=3e-3, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--device", default="cpu", show_default=True)
def finetune(train_file, out, epochs, batch_size, learning_rate, seed, device):
    """Train on an exported training-line file and write a checkpoint."""
    from .training import finetune as run

    config = AdapterConfig(
        epochs=epochs,
        batch_size=batch_size,
        learning_rate=learning_rate,
        seed=seed,
        device=device,
    )
    checkpoint = run(train_file, out, config)
    click.echo(str(checkpoint))


@cli.command()
@click.option("--checkpoint", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8050, show_default=True, type=int)
def serve(checkpoint, host, port):
    """Serve /v1/complete from a trained checkpoint."""
    import uvicorn

    from .serving import create_app

    uvicorn.run(create_app(checkpoint), host=host, port=port, log_level="info")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except (TrainingDataError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())

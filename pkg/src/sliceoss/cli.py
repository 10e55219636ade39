"""Command line entry points: serve the gateway, seed the catalog, run the
end-to-end walkthrough."""

from __future__ import annotations

import logging
import socket
import sys
import threading

import click

from .api import create_api
from .app import AppConfig, SliceOss
from .canon import canonical_dumps
from .nfvo import SimConfig


def _build_app(data_dir: str | None, seed: int, failure_probability: float) -> SliceOss:
    config = AppConfig(
        data_dir=data_dir,
        sim=SimConfig(random_seed=seed, failure_probability=failure_probability),
    )
    app = SliceOss(config)
    app.restore()
    return app


@click.group()
@click.option("--verbose", is_flag=True, help="Log at INFO level.")
def main(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--data-dir", default=None, help="Directory for the event log and snapshot.")
@click.option("--portal-dir", default=None, help="Static web portal to mount at /.")
@click.option("--seed/--no-seed", "do_seed", default=True, show_default=True,
              help="Install the starter catalog on boot.")
@click.option("--tick-interval", default=2.0, show_default=True, type=float,
              help="Seconds between automatic simulator ticks (0 disables).")
@click.option("--sync-interval", default=10.0, show_default=True, type=float,
              help="Seconds between federation synchronizations (0 disables).")
@click.option("--sim-seed", default=42, show_default=True, type=int)
@click.option("--failure-probability", default=0.0, show_default=True, type=float)
def serve(
    host: str,
    port: int,
    data_dir: str | None,
    portal_dir: str | None,
    do_seed: bool,
    tick_interval: float,
    sync_interval: float,
    sim_seed: int,
    failure_probability: float,
) -> None:
    """Run the HTTP gateway."""
    import uvicorn

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, port))
    except OSError as exc:
        click.echo(f"cannot bind {host}:{port}: {exc}", err=True)
        sys.exit(2)
    finally:
        probe.close()

    app = _build_app(data_dir, sim_seed, failure_probability)
    if do_seed:
        app.seed()
    api = create_api(app, portal_dir=portal_dir)

    stop = threading.Event()

    def ticker() -> None:
        while not stop.wait(tick_interval):
            app.tick(1)

    def syncer() -> None:
        while not stop.wait(sync_interval):
            try:
                app.sync_federation()
            except Exception:  # network trouble must not kill the loop
                logging.getLogger(__name__).exception("federation sync failed")

    if tick_interval > 0:
        threading.Thread(target=ticker, name="sim-ticker", daemon=True).start()
    if sync_interval > 0 :
        threading.Thread(target=syncer, name="fed-syncer", daemon=True).start()

    try:
        uvicorn.run(api, host=host, port=port, log_level="warning")
    finally:
        stop.set()
        app.close()


@main.command()
@click.option("--data-dir", default=None)
def seed(data_dir: str | None) -> None:
    """Install the starter catalog and print what was created."""
    app = _build_app(data_dir, 42, 0.0)
    summary = app.seed()
    app.close()
    click.echo(canonical_dumps(summary))


@main.command()
@click.option("--data-dir", default=None)
@click.option("--sim-seed", default=42, show_default=True, type=int)
@click.option("--failure-probability", default=0.0, show_default=True, type=float)
def demo(data_dir: str | None, sim_seed: int, failure_probability: float) -> None:
    """Order the sample slice bundle and walk it to completion."""
    app = _build_app(data_dir, sim_seed, failure_probability)
    summary = app.demo()
    app.close()
    click.echo(canonical_dumps(summary))


if __name__ == "__main__":
    main()

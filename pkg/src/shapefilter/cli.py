"""Command-line client for the shapefilter service.

The CLI builds a request, sends it to the HTTP service and writes the
response body.  By default the service runs in-process (no network); with
``--server URL`` the same requests go to a remote instance.  Exit codes:
0 success, 2 invalid input or configuration, 3 numeric failure.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
from click.core import ParameterSource

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

DEFAULT_ORDERS = "4,8,16,32,64,128,256"


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        # starlette warns about its bundled httpx test client; harmless here
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _tf_payload(tf: str | None, preset: str | None) -> dict:
    if (tf is None) == (preset is None):
        raise click.UsageError("give exactly one of --tf or --preset")
    if preset is not None:
        return {"preset": preset}
    text = tf
    if not text.lstrip().startswith("{"):
        text = Path(text).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"--tf is not valid JSON: {exc}")
    return {"num": doc.get("num"), "den": doc.get("den")}


def _apply_config(ctx: click.Context, config: str | None, params: dict) -> dict:
    """Explicit flags win over the config file, which wins over defaults."""
    if not config:
        return params
    doc = json.loads(Path(config).read_text())
    merged = {}
    for key, value in params.items():
        source = ctx.get_parameter_source(key)
        if source == ParameterSource.COMMANDLINE or key not in doc:
            merged[key] = value
        else:
            merged[key] = doc[key]
    return merged


def _dispatch(server: str | None, path: str, payload: dict, out: str | None) -> None:
    with _client(server) as client:
        response = client.post(path, json=payload)
    if response.status_code == 200:
        if out:
            Path(out).write_bytes(response.content)
        else:
            sys.stdout.write(response.text)
            if not response.text.endswith("\n"):
                sys.stdout.write("\n")
        return
    try:
        detail = response.json()["detail"]
    except Exception:
        detail = {"code": "HTTPError", "message": response.text}
    if isinstance(detail, dict):
        code, message = detail.get("code", "error"), detail.get("message", "")
    else:
        code, message = "ValidationError", str(detail)
    click.echo(f"{code}: {message}", err=True)
    sys.exit(EXIT_NUMERIC if response.status_code == 409 else EXIT_CONFIG)


@click.group()
@click.option("--server", default=None, help="URL of a remote service; default runs in-process.")
@click.pass_context
def main(ctx: click.Context, server: str | None):
    """Shaping filters: synthesis, simulation, and error analysis."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@click.option("--tf", default=None, help='Inline JSON {"num": [...], "den": [...]} or a path to it.')
@click.option("--preset", default=None, help="Preset name (see `shapefilter presets`).")
@click.option("--points", default=None, help="Comma-separated interpolation sample points.")
@click.option("--out", default=None, help="Output file (default stdout).")
@click.option("--config", default=None, help="JSON config file; flags override it.")
@click.pass_context
def synthesize(ctx, tf, preset, points, out, config):
    """Report realization, poles, partial fractions and impulse response."""
    params = _apply_config(ctx, config, {"tf": tf, "preset": preset, "points": points, "out": out})
    payload: dict = {"tf": _tf_payload(params["tf"], params["preset"])}
    if params["points"]:
        payload["interpolation_points"] = [float(x) for x in str(params["points"]).split(",")]
    _dispatch(ctx.obj["server"], "/synthesize", payload, params["out"])


@main.command()
@click.option("--tf", default=None, help="Inline JSON or a path to it.")
@click.option("--preset", default=None)
@click.option("--method", default="spectral", show_default=True, help="spectral | sde | ito")
@click.option("--t", "--T", "horizon", default=5.0, show_default=True, help="Horizon T in seconds.")
@click.option("--l", "--L", "order", default=256, show_default=True, help="Truncation order (spectral).")
@click.option("--seed", default=0, show_default=True)
@click.option("--stream-id", default=0, show_default=True)
@click.option("--n", default=1, show_default=True, help="Number of trajectories.")
@click.option("--grid", default=1000, show_default=True, help="Grid points per trajectory.")
@click.option("--format", "fmt", default="csv", show_default=True, help="csv | json | stats")
@click.option("--out", default=None)
@click.option("--config", default=None)
@click.pass_context
def simulate(ctx, tf, preset, method, horizon, order, seed, stream_id, n, grid, fmt, out, config):
    """Generate sample trajectories by the chosen method."""
    params = _apply_config(ctx, config, {
        "tf": tf, "preset": preset, "method": method, "horizon": horizon,
        "order": order, "seed": seed, "stream_id": stream_id, "n": n,
        "grid": grid, "fmt": fmt, "out": out,
    })
    payload = {
        "tf": _tf_payload(params["tf"], params["preset"]),
        "method": params["method"],
        "T": params["horizon"],
        "L": params["order"],
        "seed": params["seed"],
        "stream_id": params["stream_id"],
        "trajectories": params["n"],
        "grid": params["grid"],
        "format": params["fmt"],
    }
    _dispatch(ctx.obj["server"], "/simulate", payload, params["out"])


@main.command("error-table")
@click.option("--tf", default=None, help="Inline JSON or a path to it.")
@click.option("--preset", default=None)
@click.option("--t", "--T", "horizon", default=5.0, show_default=True)
@click.option("--l", "--L", "orders", default=DEFAULT_ORDERS, show_default=True,
              help="Comma-separated truncation orders.")
@click.option("--w-form", default="factored", show_default=True, help="factored | polynomial")
@click.option("--format", "fmt", default="csv", show_default=True, help="csv | json")
@click.option("--out", default=None)
@click.option("--config", default=None)
@click.pass_context
def error_table(ctx, tf, preset, horizon, orders, w_form, fmt, out, config):
    """Exact mean-square approximation errors over truncation orders."""
    params = _apply_config(ctx, config, {
        "tf": tf, "preset": preset, "horizon": horizon, "orders": orders,
        "w_form": w_form, "fmt": fmt, "out": out,
    })
    payload = {
        "tf": _tf_payload(params["tf"], params["preset"]),
        "T": params["horizon"],
        "orders": [int(x) for x in str(params["orders"]).split(",")],
        "w_form": params["w_form"],
        "format": params["fmt"],
    }
    _dispatch(ctx.obj["server"], "/error-table", payload, params["out"])


@main.command()
@click.option("--operator", "name", required=True,
              help="P | Pinv | exact | rational | whiten")
@click.option("--tf", default=None, help="Inline JSON or a path to it.")
@click.option("--preset", default=None)
@click.option("--t", "--T", "horizon", default=5.0, show_default=True)
@click.option("--l", "--L", "order", default=256, show_default=True)
@click.option("--w-form", default="factored", show_default=True)
@click.option("--format", "fmt", default="csv", show_default=True, help="csv | json")
@click.option("--out", default=None)
@click.option("--config", default=None)
@click.pass_context
def operator(ctx, name, tf, preset, horizon, order, w_form, fmt, out, config):
    """Dump a spectral operator matrix with metadata."""
    params = _apply_config(ctx, config, {
        "name": name, "tf": tf, "preset": preset, "horizon": horizon,
        "order": order, "w_form": w_form, "fmt": fmt, "out": out,
    })
    payload: dict = {
        "name": params["name"],
        "T": params["horizon"],
        "L": params["order"],
        "w_form": params["w_form"],
        "format": params["fmt"],
    }
    if params["tf"] is not None or params["preset"] is not None:
        payload["tf"] = _tf_payload(params["tf"], params["preset"])
    _dispatch(ctx.obj["server"], "/operator", payload, params["out"])


@main.command()
@click.pass_context
def presets(ctx):
    """List built-in presets."""
    with _client(ctx.obj["server"]) as client:
        response = client.get("/presets")
    for item in response.json():
        click.echo(f"{item['name']:10s} num={item['num']} den={item['den']}  {item['description']}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host: str, port: int):  # pragma: no cover - wraps uvicorn
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":  # pragma: no cover
    main()

"""Batch front-end: config ingestion, suite orchestration, report emission.

Every subcommand reads zero or more JSON config files, runs one tool over
each, and emits a single report with a fixed top-level schema
{tool_version, manifest, results[]}.  Reports are byte-deterministic for a
fixed manifest.

Exit codes: 0 all pass, 1 verification failure, 2 configuration error,
3 resource error.
"""

from __future__ import annotations

import io
import json
import sys
from pathlib import Path

import click

from . import __version__
from .ambient import ConfigError, DomainError
from .base_system import QebsConfig, config_from_dict, validate_qebs
from .roots import RootWindow, generate, check_ebs
from .classify import classify_rank1, classify_rank2, ears_data
from .presentation import emit_sr, emit_sr_sharp, emit_tsr
from .unfold import ResourceError, build_handy, verify_pi
from .quantum_torus import verify_q, structure_suite

_OK, _FAIL, _CONFIG, _RESOURCE = 0, 1, 2, 3


def _load_config(path: str) -> QebsConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    cfg = config_from_dict(data)
    rep = validate_qebs(cfg)
    if not rep.passed:
        bad = "; ".join(f"{e.axiom}: {e.witness}" for e in rep.failures())
        raise ConfigError(f"{path}: {bad}")
    return cfg


def _parse_window(text: str, pad: int) -> RootWindow:
    try:
        m, n = (int(x) for x in text.split(","))
    except ValueError:
        raise click.BadParameter(f"window {text!r} is not M,N")
    return RootWindow(m, n, pad)


def _manifest(configs, command, **params) -> dict:
    return {
        "configs": list(configs),
        "command": command,
        **{k: v for k, v in sorted(params.items())},
    }


def _flatten(value) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    rows = []
    for res in report["results"]:
        if isinstance(res, dict):
            rows.append({k: _flatten(v) for k, v in res.items()})
        else:
            rows.append({"value": _flatten(res)})
    cols = sorted({c for r in rows for c in r})
    if fmt == "csv":
        import csv

        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({c: r.get(c, "") for c in cols})
        return buf.getvalue()
    # latex
    out = ["\\begin{tabular}{" + "l" * len(cols) + "}"]
    esc = lambda s: s.replace("\\", "\\textbackslash{}").replace("_", "\\_")
    out.append(" & ".join(esc(c) for c in cols) + " \\\\")
    out.append("\\hline")
    for r in rows:
        out.append(" & ".join(esc(r.get(c, "")) for c in cols) + " \\\\")
    out.append("\\end{tabular}")
    return "\n".join(out) + "\n"


def _emit(report: dict, fmt: str, out: str | None, name: str) -> None:
    text = _render(report, fmt)
    if out:
        ext = {"json": "json", "csv": "csv", "latex": "tex"}[fmt]
        path = Path(out) / f"{name}.{ext}"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run_batch(paths, manifest, fmt, out, name, worker):
    """Run `worker(path, config)` per config; per-config errors become result
    entries instead of aborting the batch."""
    results = []
    code = _OK
    for path in paths:
        try:
            cfg = _load_config(path)
            entry, entry_code = worker(path, cfg)
        except ResourceError as e:
            entry = {"config": path, "status": "resource-error",
                     "error": str(e), "completed_height": e.completed_height}
            entry_code = _RESOURCE
        except (ConfigError, DomainError, OSError, json.JSONDecodeError) as e:
            entry = {"config": path, "status": "config-error", "error": str(e)}
            entry_code = _CONFIG
        results.append(entry)
        code = max(code, entry_code)
    report = {"tool_version": __version__, "manifest": manifest,
              "results": results}
    _emit(report, fmt, out, name)
    sys.exit(code)


def _common(f):
    f = click.option("--config", "configs", multiple=True, required=False,
                     type=click.Path(), help="QEBS config file (JSON)")(f)
    f = click.option("--format", "fmt", default="json",
                     type=click.Choice(["json", "csv", "latex"]))(f)
    f = click.option("--out", default=None, type=click.Path(),
                     help="directory for report files; stdout when absent")(f)
    return f


@click.group()
@click.version_option(__version__)
def main():
    """Elliptic root system toolkit."""


@main.command()
@_common
def classify(configs, fmt, out):
    """Tabulate the rank-1 case per node and the rank-2 case per adjacent
    ordered pair."""
    manifest = _manifest(configs, "classify", format=fmt, out=out)

    def worker(path, cfg):
        sp = cfg.space
        rs = generate(cfg, RootWindow(3, 3, 2))
        rank1 = [classify_rank1(cfg, i, rs) for i in cfg.nodes]
        rank2 = []
        for i in cfg.nodes:
            for j in cfg.nodes:
                if i == j or sp.cartan[j][i] != -1 or not cfg.g[j].is_empty:
                    continue
                try:
                    rank2.append(classify_rank2(cfg, i, j, rs))
                except DomainError:
                    continue
        entry = {
            "config": path,
            "status": "ok",
            "rank1": [{"case": r.case, "X": r.name, **r.data} for r in rank1],
            "rank2": [{"case": r.case, "Y": r.name, **r.data} for r in rank2],
        }
        return entry, _OK

    _run_batch(configs, manifest, fmt, out, "classify", worker)


@main.command()
@_common
@click.option("--window", default="6,6", help="inner window M,N")
@click.option("--pad", default=2, type=int)
def roots(configs, fmt, out, window, pad):
    """Enumerate the window slice of R(k,g), sorted lexicographically."""
    win = _parse_window(window, pad)
    manifest = _manifest(configs, "roots", window=[win.M, win.N], pad=pad,
                         format=fmt, out=out)

    def worker(path, cfg):
        rs = generate(cfg, win)
        return {"config": path, "status": "ok",
                "roots": rs.to_json_entries()}, _OK

    _run_batch(configs, manifest, fmt, out, "roots", worker)


@main.command(name="verify-ebs")
@_common
@click.option("--window", default="6,6", help="inner window M,N")
@click.option("--pad", default=2, type=int)
def verify_ebs(configs, fmt, out, window, pad):
    """Check the elliptic axioms (reflection closure and form properties)
    on a window slice."""
    win = _parse_window(window, pad)
    manifest = _manifest(configs, "verify-ebs", window=[win.M, win.N],
                         pad=pad, format=fmt, out=out)

    def worker(path, cfg):
        rs = generate(cfg, win)
        rep = check_ebs(rs)
        status = "ok" if rep.passed else "fail"
        return ({"config": path, "status": status, **rep.to_dict()},
                _OK if rep.passed else _FAIL)

    _run_batch(configs, manifest, fmt, out, "verify-ebs", worker)


@main.command()
@_common
def unfold(configs, fmt, out):
    """Print the unfolded datum (index set, Cartan matrix, odd part,
    symmetrizers) for each config."""
    manifest = _manifest(configs, "unfold", format=fmt, out=out)

    def worker(path, cfg):
        hd = build_handy(cfg)
        return {"config": path, "status": "ok", **hd.to_dict()}, _OK

    _run_batch(configs, manifest, fmt, out, "unfold", worker)


@main.command(name="verify-pi")
@_common
@click.option("--height", default=None, type=int,
              help="graded build height; auto-sized when absent")
def verify_pi_cmd(configs, fmt, out, height):
    """Substitute the loop-algebra images into every defining relation and
    report per-relation status plus the extracted form constant."""
    manifest = _manifest(configs, "verify-pi", height=height, format=fmt,
                         out=out)

    def worker(path, cfg):
        rep, _ = verify_pi(cfg, height=height)
        status = "ok" if rep.passed else "fail"
        return ({"config": path, "status": status, **rep.to_dict()},
                _OK if rep.passed else _FAIL)

    _run_batch(configs, manifest, fmt, out, "verify-pi", worker)


@main.command(name="qtorus-verify")
@click.option("--rank", "rank", default=2, type=int, help="finite rank l")
@click.option("--q-numeric", default=None,
              help="rational value p/r for q; formal q when absent")
@click.option("--format", "fmt", default="json",
              type=click.Choice(["json", "csv", "latex"]))
@click.option("--out", default=None, type=click.Path())
def qtorus_verify(rank, q_numeric, fmt, out):
    """Verify the quantum-torus realization for the untwisted A-type config
    of the given rank, plus the bracket structure suite."""
    from fractions import Fraction
    from .base_system import simple_config

    manifest = _manifest([], "qtorus-verify", rank=rank,
                         q_numeric=q_numeric, format=fmt, out=out)
    qv = None
    if q_numeric is not None:
        qv = Fraction(q_numeric)
    results = []
    code = _OK
    try:
        cfg = simple_config(f"A{rank}(1)")
        rep = verify_q(cfg, q_numeric=qv)
        suite = structure_suite()
        for tag, r in (("relations", rep), ("structure", suite)):
            status = "ok" if r.passed else "fail"
            results.append({"suite": tag, "status": status, **r.to_dict()})
            if not r.passed:
                code = _FAIL
    except (ConfigError, DomainError) as e:
        results.append({"suite": "relations", "status": "config-error",
                        "error": str(e)})
        code = _CONFIG
    report = {"tool_version": __version__, "manifest": manifest,
              "results": results}
    _emit(report, fmt, out, "qtorus-verify")
    sys.exit(code)


_PRESETS = {
    "sr": emit_sr,
    "sr-sharp": emit_sr_sharp,
    "tsr": emit_tsr,
}


@main.command()
@_common
@click.option("--preset", default="sr",
              type=click.Choice(sorted(_PRESETS)))
def relations(configs, fmt, out, preset):
    """Emit a defining relation set (full, sharp-restricted, or the finite
    elliptic-basis form)."""
    manifest = _manifest(configs, "relations", preset=preset, format=fmt,
                         out=out)

    def worker(path, cfg):
        rels = _PRESETS[preset](cfg)
        return {"config": path, "status": "ok",
                "relations": json.loads(rels.to_json())}, _OK

    _run_batch(configs, manifest, fmt, out, "relations", worker)


@main.command()
@_common
@click.option("--window", default="6,6", help="inner window M,N")
@click.option("--pad", default=2, type=int)
def ears(configs, fmt, out, window, pad):
    """Emit the quadruple (X, S, L, E) describing the marked root system."""
    win = _parse_window(window, pad)
    manifest = _manifest(configs, "ears", window=[win.M, win.N], pad=pad,
                         format=fmt, out=out)

    def worker(path, cfg):
        data = ears_data(cfg, win)
        return {"config": path, "status": "ok", **data}, _OK

    _run_batch(configs, manifest, fmt, out, "ears", worker)


_EXPORT_PRESETS = ("roots", "sr", "sr-sharp", "tsr", "handy", "ears")


@main.command()
@click.option("--config", "configs", multiple=True, required=True,
              type=click.Path())
@click.option("--preset", default="roots",
              type=click.Choice(_EXPORT_PRESETS))
@click.option("--window", default="6,6", help="inner window M,N")
@click.option("--pad", default=2, type=int)
@click.option("--out", required=True, type=click.Path())
def export(configs, preset, window, pad, out):
    """Write one artifact file per config; bytes are deterministic for a
    fixed manifest."""
    win = _parse_window(window, pad)
    manifest = _manifest(configs, "export", preset=preset,
                         window=[win.M, win.N], pad=pad, out=out)
    code = _OK
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    for idx, path in enumerate(configs):
        name = f"{preset}-{idx}-{Path(path).stem}.json"
        try:
            cfg = _load_config(path)
            if preset == "roots":
                payload = generate(cfg, win).to_json_entries()
            elif preset in ("sr", "sr-sharp", "tsr"):
                payload = json.loads(_PRESETS[preset](cfg).to_json())
            elif preset == "handy":
                payload = build_handy(cfg).to_dict()
            else:
                payload = ears_data(cfg, win)
            doc = {"tool_version": __version__, "manifest": manifest,
                   "config": path, "data": payload}
            (outdir / name).write_text(
                json.dumps(doc, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
        except (ConfigError, DomainError, json.JSONDecodeError) as e:
            (outdir / name).write_text(
                json.dumps({"config": path, "status": "config-error",
                            "error": str(e)}, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            code = max(code, _CONFIG)
        except OSError as e:
            click.echo(f"write failed for {name}: {e}", err=True)
            code = max(code, _CONFIG)
    sys.exit(code)


if __name__ == "__main__":
    main()

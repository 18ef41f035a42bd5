"""Command-line entry point: parse, analyze, build-dataset, simulate, evaluate, serve.

Every subcommand prints an effective-config header first, so a run can
be reproduced from its own output. Diagnostics go to stderr and never
change the exit status; exit codes are 0 (ok), 1 (fatal), 2 (usage).
"""

from __future__ import annotations

import json
import os
import random
from pathlib import Path
from typing import Optional

import click

from . import analytics, datasets, hand_history, metrics
from .hand_history import BlindStructure
from .money import to_cents
from .simulate import MatchSpec, run_match


def _echo_config(command: str, config: dict) -> None:
    click.echo(f"# {command} config {json.dumps(config, sort_keys=True)}")


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is None:
        seed = random.SystemRandom().randrange(2**32)
    return seed


@click.group(context_settings={"auto_envvar_prefix": "HOLDEMLAB"})
@click.version_option(package_name="holdemlab")
def main() -> None:
    """Texas Hold'em data, simulation and advisor toolkit.

    Every flag can also come from the environment as
    HOLDEMLAB_<COMMAND>_<FLAG>, e.g. HOLDEMLAB_SERVE_ADVISOR.
    """


@main.command("parse")
@click.argument("in_path", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "-o", type=click.Path(path_type=Path), default=Path("hands.jsonl"))
def cmd_parse(in_path: Path, out: Path) -> None:
    """Parse hand-history text files into a hand_record.v1 JSON-lines file.

    IN_PATH is a single file or a directory of .txt files.
    """
    files = sorted(in_path.glob("*.txt")) if in_path.is_dir() else [in_path]
    _echo_config("parse", {"in": str(in_path), "out": str(out), "files": len(files)})
    records = []
    n_diags = 0
    for path in files:
        text = path.read_text(encoding="utf-8")
        recs, diags = hand_history.parse_file(text, source=str(path))
        records.extend(recs)
        for diag in diags:
            click.echo(str(diag), err=True)
        n_diags += len(diags)
    with out.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(hand_history.dumps_record(record) + "\n")
    click.echo(f"{len(records)} hands, {n_diags} diagnostics -> {out}")


def _load_hands(path: Path) -> list[hand_history.HandRecord]:
    records = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(hand_history.loads_record(line))
    return records


@main.command("analyze")
@click.argument("hands_file", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "-o", type=click.Path(path_type=Path), default=Path("players.csv"))
@click.option("--min-hands", type=int, default=1, show_default=True)
@click.option("--histogram", type=click.Path(path_type=Path), default=None,
              help="Also write a revenue histogram CSV.")
@click.option("--player", default=None, help="Restrict the histogram to one player.")
@click.option("--bin-width", type=float, default=1.0, show_default=True)
@click.option("--bin-range", type=float, default=25.0, show_default=True,
              help="Histogram spans [-range, +range] big blinds.")
def cmd_analyze(
    hands_file: Path,
    out: Path,
    min_hands: int,
    histogram: Optional[Path],
    player: Optional[str],
    bin_width: float,
    bin_range: float,
) -> None:
    """Per-player win-rate report (name, hands, net_bb, mbb_h, stderr)."""
    _echo_config(
        "analyze",
        {"hands": str(hands_file), "out": str(out), "min_hands": min_hands},
    )
    corpus = _load_hands(hands_file)
    stats = analytics.compute_stats(corpus)
    rows = analytics.stats_report_rows(stats, min_hands=min_hands)
    with out.open("w", encoding="utf-8") as fh:
        fh.write("name,hands,net_bb,mbb_h,stddev\n")
        for name, hands, net_bb, mbb_h, stderr in rows:
            fh.write(f"{name},{hands},{net_bb:.4f},{mbb_h:.2f},{stderr:.2f}\n")
    click.echo(f"{len(rows)} players ({len(corpus)} hands) -> {out}")

    if histogram is not None:
        deltas = []
        for record in corpus:
            for name in record.results:
                if player is None or name == player:
                    deltas.append(float(analytics.hand_delta_bb(record, name)))
        edges = []
        edge = -bin_range
        while edge <= bin_range + 1e-9:
            edges.append(round(edge, 6))
            edge += bin_width
        hist = analytics.revenue_histogram(deltas, edges)
        with histogram.open("w", encoding="utf-8") as fh:
            fh.write("bin_lo,bin_hi,count\n")
            for lo, hi, count in hist.rows():
                fh.write(f"{lo},{hi},{count}\n")
        click.echo(f"histogram ({len(deltas)} deltas) -> {histogram}")


@main.command("build-dataset")
@click.argument("hands_file", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "-o", type=click.Path(path_type=Path), default=Path("dataset"))
@click.option("--min-winrate", type=int, default=None,
              help="Keep heroes strictly above this mbb/h.")
@click.option("--max-winrate", type=int, default=None,
              help="Keep heroes at or below this mbb/h.")
@click.option("--raw", is_flag=True, help="Emit verbatim log text as prompts.")
@click.option("--min-hands", type=int, default=1, show_default=True,
              help="Ignore players with fewer hands when banding.")
@click.option("--seed", type=int, default=None, help="Split seed; random if omitted.")
def cmd_build_dataset(
    hands_file: Path,
    out: Path,
    min_winrate: Optional[int],
    max_winrate: Optional[int],
    raw: bool,
    min_hands: int,
    seed: Optional[int],
) -> None:
    """Emit sft_train/sft_test/reward JSON-lines plus a manifest."""
    seed = _resolve_seed(seed)
    _echo_config(
        "build-dataset",
        {
            "hands": str(hands_file),
            "out": str(out),
            "min_winrate": min_winrate,
            "max_winrate": max_winrate,
            "raw": raw,
            "min_hands": min_hands,
            "seed": seed,
        },
    )
    corpus = _load_hands(hands_file)
    stats = analytics.compute_stats(corpus)
    try:
        if raw:
            dataset = datasets.emit_raw_variant(corpus, seed=seed, stats=stats)
        else:
            band = None
            if min_winrate is not None or max_winrate is not None:
                band = analytics.WinRateBand(lower=min_winrate, upper=max_winrate)
            dataset = datasets.emit_sft(
                corpus,
                band,
                seed,
                stats=stats,
                min_hands=min_hands,
                variant="banded" if band else "filtered",
            )
        reward = datasets.emit_reward(corpus, stats=stats, seed=seed, min_hands=min_hands)
        manifest = datasets.write_dataset(out, dataset, reward)
    except datasets.EmptyDatasetError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(json.dumps(manifest.to_json_dict(), sort_keys=True))


@main.command("simulate")
@click.option("--players", type=int, required=True)
@click.option("--hands", type=int, default=1000, show_default=True)
@click.option("--policy", "policies", multiple=True,
              help="Per-seat policy specs, first seats first. May repeat.")
@click.option("--policy-all", default="random", show_default=True,
              help="Policy for seats without an explicit --policy.")
@click.option("--blinds", default="0.02/0.05", show_default=True)
@click.option("--stack-bb", type=int, default=100, show_default=True)
@click.option("--no-rotation", is_flag=True)
@click.option("--seed", type=int, default=None)
@click.option("--jobs", type=int, default=None, help="Worker processes; default CPU count.")
@click.option("--report", type=click.Path(path_type=Path), default=None)
@click.option("--transcripts", type=click.Path(path_type=Path), default=None,
              help="Dump every hand as hand-history text.")
def cmd_simulate(
    players: int,
    hands: int,
    policies: tuple[str, ...],
    policy_all: str,
    blinds: str,
    stack_bb: int,
    no_rotation: bool,
    seed: Optional[int],
    jobs: Optional[int],
    report: Optional[Path],
    transcripts: Optional[Path],
) -> None:
    """Run a policy-vs-policy match and report per-policy statistics."""
    if not 2 <= players <= 15:
        raise click.UsageError("--players must be between 2 and 15")
    if len(policies) > players:
        raise click.UsageError("more --policy entries than players")
    seed = _resolve_seed(seed)
    jobs = jobs or os.cpu_count() or 1
    try:
        small, big = blinds.split("/")
        blind_structure = BlindStructure(to_cents(small), to_cents(big))
    except (ValueError, IndexError) as exc:
        raise click.UsageError(f"bad --blinds {blinds!r}: {exc}") from exc
    seat_policies = list(policies) + [policy_all] * (players - len(policies))
    spec = MatchSpec(
        policies=tuple(seat_policies),
        hands=hands,
        blinds=blind_structure,
        stacks=tuple([stack_bb * blind_structure.big_blind] * players),
        base_seed=seed,
        rotation=not no_rotation,
        jobs=jobs,
        transcript_path=str(transcripts) if transcripts else None,
    )
    _echo_config(
        "simulate",
        {
            "players": players,
            "hands": hands,
            "policies": seat_policies,
            "blinds": blinds,
            "stack_bb": stack_bb,
            "rotation": not no_rotation,
            "seed": seed,
            "jobs": jobs,
        },
    )
    result = run_match(spec)
    if result.aborted:
        click.echo("match aborted: remote error budget exhausted", err=True)
    for stat in result.per_policy:
        click.echo(
            f"{stat.policy}: {stat.mbb_h:+.1f} mbb/h (stderr {stat.stderr_mbb:.1f}), "
            f"invest {stat.avg_investment_bb:.2f} bb, "
            f"response {stat.mean_response_s * 1000:.2f} ms"
        )
    if report is not None:
        report.write_text(result.to_json(), encoding="utf-8")
        click.echo(f"report -> {report}")
    if result.aborted:
        raise click.ClickException("remote policy failure budget exceeded")


@main.command("evaluate")
@click.argument("predictions_file", type=click.Path(exists=True, path_type=Path))
@click.argument("truth_file", type=click.Path(exists=True, path_type=Path))
@click.option("--big-blind", type=float, default=1.0, show_default=True,
              help="Unit for the amount MSE (file amounts / this value).")
@click.option("--out", "-o", type=click.Path(path_type=Path), default=None)
def cmd_evaluate(
    predictions_file: Path, truth_file: Path, big_blind: float, out: Optional[Path]
) -> None:
    """Score an action-prediction file against ground truth.

    Both files are JSON lines: {"action": "call", "amount": 0.3}. The
    amount is read only for bet/raise records.
    """
    _echo_config(
        "evaluate",
        {
            "predictions": str(predictions_file),
            "truth": str(truth_file),
            "big_blind": big_blind,
        },
    )

    def load(path: Path) -> list[dict]:
        rows = []
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rows.append(json.loads(line))
        return rows

    pred_rows, truth_rows = load(predictions_file), load(truth_file)
    if len(pred_rows) != len(truth_rows):
        raise click.ClickException(
            f"length mismatch: {len(pred_rows)} predictions vs {len(truth_rows)} truths"
        )
    if not pred_rows:
        raise click.ClickException("empty evaluation files")
    try:
        pred = [metrics.ActionLabel(r["action"]) for r in pred_rows]
        truth = [metrics.ActionLabel(r["action"]) for r in truth_rows]
    except (KeyError, ValueError) as exc:
        raise click.ClickException(f"bad action label: {exc}") from exc

    value_kinds = {metrics.ActionLabel.BET, metrics.ActionLabel.RAISE}
    pairs = [
        (float(p.get("amount", 0.0)), float(t.get("amount", 0.0)))
        for p, t, pl, tl in zip(pred_rows, truth_rows, pred, truth)
        if pl == tl and tl in value_kinds
    ]
    report_dict = {
        "samples": len(pred),
        "macro_f1": round(metrics.macro_f1(pred, truth), 6),
        "amount_mse_bb": round(
            metrics.amount_mse_bb(
                [p for p, _ in pairs], [t for _, t in pairs], big_blind
            ),
            6,
        ),
        "value_pairs": len(pairs),
        "labels": [label.value for label in metrics.LABELS],
        "confusion": metrics.confusion_matrix(pred, truth),
    }
    text = json.dumps(report_dict, indent=2, sort_keys=True)
    click.echo(text)
    header = " ".join(f"{label.value:>6}" for label in metrics.LABELS)
    click.echo(f"{'truth/pred':>10} {header}")
    for label, row in zip(metrics.LABELS, report_dict["confusion"]):
        cells = " ".join(f"{c:>6}" for c in row)
        click.echo(f"{label.value:>10} {cells}")
    if out is not None:
        out.write_text(text + "\n", encoding="utf-8")
        click.echo(f"report -> {out}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8700, show_default=True)
@click.option("--advisor", default="equity", show_default=True,
              help="'equity' or 'remote:<endpoint url>'.")
@click.option("--timeout", type=float, default=10.0, show_default=True,
              help="Advisor decision timeout in seconds.")
@click.option("--equity-samples", type=int, default=400, show_default=True)
@click.option("--persist-dir", type=click.Path(path_type=Path), default=None,
              help="Append-only session event logs; replayed on restart.")
@click.option("--ui-dir", type=click.Path(path_type=Path), default=None,
              help="Static UI bundle to serve at /.")
def cmd_serve(
    host: str,
    port: int,
    advisor: str,
    timeout: float,
    equity_samples: int,
    persist_dir: Optional[Path],
    ui_dir: Optional[Path],
) -> None:
    """Run the live advisor HTTP service (API under /v1)."""
    import uvicorn

    from .service import ServiceSettings, create_app

    _echo_config(
        "serve",
        {
            "host": host,
            "port": port,
            "advisor": advisor,
            "timeout": timeout,
            "equity_samples": equity_samples,
            "persist_dir": str(persist_dir) if persist_dir else None,
            "ui_dir": str(ui_dir) if ui_dir else None,
        },
    )
    app = create_app(
        ServiceSettings(
            advisor=advisor,
            advisor_timeout_s=timeout,
            persist_dir=persist_dir,
            equity_samples=equity_samples,
            ui_dir=ui_dir,
        )
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main(prog_name="holdemlab")

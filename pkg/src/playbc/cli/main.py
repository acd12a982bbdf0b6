"""Command-line interface.

Every training command derives a run id from its canonical configuration
and the identity of its input data, records finished runs in an
append-only registry, and refuses to silently repeat a registered run
(``--force`` overrides). Dataset paths may be given relative to
``$PLAYBC_DATA_ROOT``; the registry directory defaults to ``./runs`` or
``$PLAYBC_RUNS_DIR``.
"""

from __future__ import annotations

import functools
import logging
from pathlib import Path

import click

from playbc import __version__
from playbc.bc import BCConfig, InitMode, train_bc
from playbc.cli.configio import (
    bc_config_from_dict,
    default_runs_dir,
    load_yaml_config,
    pretrain_config_from_dict,
    resolve_data_path,
)
from playbc.cli.registry import RunRecord, append_run, compute_run_id, find_run, now_iso
from playbc.datasets import load_demo_dataset, load_play_dataset
from playbc.errors import ConfigError, PlaybcError
from playbc.evaluation import (
    ResultRecord,
    compile_results_table,
    evaluate_mse,
    median_by_value,
    read_ablation_csv,
    run_ablation,
    write_ablation_csv,
)
from playbc.evaluation.evaluate import EvalReport
from playbc.models import (
    PolicyConfig,
    build_policy,
    checkpoint_id,
    convert_external_weights,
    load_checkpoint,
    load_into_module,
    load_name_map,
    save_checkpoint,
)
from playbc.pretrain import pretrain_autoencoder, pretrain_byol, pretrain_vae
from playbc.synth import SynthConfig, generate_expert_demos, generate_play_synthetic

log = logging.getLogger(__name__)

PRETRAINERS = {"byol": pretrain_byol, "ae": pretrain_autoencoder, "vae": pretrain_vae}


def guarded(fn):
    """Convert package errors into clean CLI failures (exit code 1)."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PlaybcError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _dataset_identity(manifest) -> str:
    return f"{manifest.dataset_id}:{manifest.n_trajectories}:{manifest.n_frames_total}"


def _check_rerun(runs_dir: Path, run_id: str, force: bool) -> None:
    existing = find_run(runs_dir, run_id)
    if existing is not None and not force:
        raise click.ClickException(
            f"run {run_id} already registered ({existing.command}, {existing.created}); "
            "pass --force to repeat it"
        )


def _register(runs_dir: Path, command: str, run_id: str, seed: int, config: dict, data_id: str, artifacts) -> None:
    record = RunRecord(
        run_id=run_id,
        command=command,
        seed=seed,
        config=config,
        data_id=data_id,
        artifacts=tuple(str(a) for a in artifacts),
        created=now_iso(),
    )
    append_run(runs_dir, record)


@click.group()
@click.version_option(version=__version__, prog_name="playbc")
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def cli(verbose: bool) -> None:
    """Pretraining on interaction video, behavior cloning, and evaluation."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


@cli.command()
@click.option("--root", required=True, type=click.Path(path_type=Path), help="Output corpus directory.")
@click.option("--kind", type=click.Choice(["play", "demos"]), default="play", show_default=True)
@click.option("--task", type=click.Choice(["push", "reach"]), default="push", show_default=True,
              help="Demo task (kind=demos only).")
@click.option("--palette", type=click.Choice(["full", "warm", "cool"]), default="warm",
              show_default=True, help="Object hue band (kind=demos only).")
@click.option("--trajectories", "-n", type=int, default=20, show_default=True)
@click.option("--frames", type=int, default=60, show_default=True,
              help="Frames per play trajectory, or the demo frame budget.")
@click.option("--size", type=int, default=64, show_default=True, help="Frame side length, px.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--force", is_flag=True, help="Overwrite an existing corpus at --root.")
@guarded
def synthgen(root: Path, kind: str, task: str, palette: str, trajectories: int, frames: int,
             size: int, seed: int, force: bool) -> None:
    """Generate a synthetic corpus (play data or scripted-expert demos)."""
    root = resolve_data_path(root)
    if (root / "manifest.json").exists() and not force:
        raise click.ClickException(f"{root} already holds a corpus; pass --force to regenerate")
    cfg = SynthConfig(size=size)
    if kind == "play":
        ds = generate_play_synthetic(cfg, trajectories, frames, seed=seed, root=root)
    else:
        ds = generate_expert_demos(cfg, task, trajectories, seed=seed, max_frames=frames,
                                   palette=palette, root=root)
    click.echo(f"wrote {len(ds)} trajectories / {ds.n_frames} frames to {root}")


@cli.command()
@click.option("--play-root", required=True, type=click.Path(path_type=Path))
@click.option("--mode", type=click.Choice(sorted(PRETRAINERS)), default="byol", show_default=True)
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="YAML file of PretrainConfig fields.")
@click.option("--init-checkpoint", type=click.Path(path_type=Path), default=None,
              help="Warm-start the encoder trunk (e.g. imported classification weights).")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Checkpoint path (default: <runs-dir>/<run-id>.ckpt).")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--runs-dir", type=click.Path(path_type=Path), default=None)
@click.option("--force", is_flag=True, help="Re-run even if this run id is registered.")
@guarded
def pretrain(play_root: Path, mode: str, config_path: Path | None, init_checkpoint: Path | None,
             out: Path | None, seed: int | None, runs_dir: Path | None, force: bool) -> None:
    """Self-supervised pretraining on an unlabeled play corpus."""
    runs_dir = Path(runs_dir) if runs_dir is not None else default_runs_dir()
    raw = load_yaml_config(config_path) if config_path is not None else {}
    if seed is not None:
        raw["seed"] = seed
    cfg = pretrain_config_from_dict(raw)

    dataset = load_play_dataset(resolve_data_path(play_root))
    init_bundle = None
    init_id = ""
    if init_checkpoint is not None:
        init_bundle = load_checkpoint(init_checkpoint)
        init_id = checkpoint_id(init_checkpoint)
    data_id = _dataset_identity(dataset.manifest) + (f"+init:{init_id}" if init_id else "")
    run_id = compute_run_id(f"pretrain:{mode}", cfg.to_dict(), data_id)
    _check_rerun(runs_dir, run_id, force)

    out = Path(out) if out is not None else runs_dir / f"{run_id}.ckpt"
    out.parent.mkdir(parents=True, exist_ok=True)
    bundle, tlog = PRETRAINERS[mode](dataset, cfg, init_bundle=init_bundle, out_path=out)
    log_path = out.with_suffix(".losses.csv")
    tlog.to_csv(log_path)
    _register(runs_dir, f"pretrain:{mode}", run_id, cfg.seed, cfg.to_dict(), data_id,
              [out, log_path])
    click.echo(f"run {run_id}: {mode} pretraining done, final loss {tlog.losses[-1]:.5f}")
    click.echo(f"checkpoint: {out}")


@cli.command("train-bc")
@click.option("--demos-root", required=True, type=click.Path(path_type=Path))
@click.option("--task", default="push", show_default=True)
@click.option("--init-mode", default="scratch", show_default=True,
              type=click.Choice([m.value for m in InitMode]))
@click.option("--init-checkpoint", type=click.Path(path_type=Path), default=None,
              help="Pretrained encoder (or donor policy) checkpoint.")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="YAML file of BCConfig fields.")
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--runs-dir", type=click.Path(path_type=Path), default=None)
@click.option("--force", is_flag=True)
@guarded
def train_bc_cmd(demos_root: Path, task: str, init_mode: str, init_checkpoint: Path | None,
                 config_path: Path | None, out: Path | None, seed: int | None,
                 runs_dir: Path | None, force: bool) -> None:
    """Behavior cloning on demonstrations, optionally from pretrained weights."""
    runs_dir = Path(runs_dir) if runs_dir is not None else default_runs_dir()
    raw = load_yaml_config(config_path) if config_path is not None else {}
    raw.setdefault("task", task)
    raw["init_mode"] = init_mode
    if seed is not None:
        raw["seed"] = seed
    cfg = bc_config_from_dict(raw)

    demos = load_demo_dataset(resolve_data_path(demos_root), task=cfg.task)
    init_bundle = None
    init_id = ""
    if init_checkpoint is not None:
        init_bundle = load_checkpoint(init_checkpoint)
        init_id = checkpoint_id(init_checkpoint)

    data_id = _dataset_identity(demos.manifest) + (f"+init:{init_id}" if init_id else "")
    run_id = compute_run_id("train-bc", cfg.to_dict(), data_id)
    _check_rerun(runs_dir, run_id, force)

    out = Path(out) if out is not None else runs_dir / f"{run_id}.ckpt"
    out.parent.mkdir(parents=True, exist_ok=True)
    bundle, tlog = train_bc(demos, cfg, init_bundle=init_bundle, out_path=out)
    log_path = out.with_suffix(".losses.csv")
    tlog.to_csv(log_path)
    _register(runs_dir, "train-bc", run_id, cfg.seed, cfg.to_dict(), data_id, [out, log_path])
    click.echo(f"run {run_id}: bc training done, final loss {tlog.losses[-1]:.5f}")
    click.echo(f"checkpoint: {out}")


@cli.command("eval")
@click.option("--checkpoint", required=True, type=click.Path(path_type=Path))
@click.option("--demos-root", required=True, type=click.Path(path_type=Path),
              help="Held-out demonstration corpus.")
@click.option("--task", default=None, help="Task label (default: the checkpoint's own task).")
@click.option("--batch-size", type=int, default=64, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Report JSON path.")
@guarded
def eval_cmd(checkpoint: Path, demos_root: Path, task: str | None, batch_size: int,
             out: Path | None) -> None:
    """Held-out action-MSE evaluation of a trained policy checkpoint."""
    bundle = load_checkpoint(checkpoint)
    if bundle.meta.pretrain_mode != "bc":
        raise ConfigError(
            f"{checkpoint} is a {bundle.meta.pretrain_mode!r} checkpoint, not a trained policy"
        )
    task = task if task is not None else str(bundle.config_echo.get("task", ""))
    input_size = int(bundle.config_echo.get("input_size", 224))
    demos = load_demo_dataset(resolve_data_path(demos_root), task=task)

    policy = build_policy(PolicyConfig(input_size=input_size), seed=0)
    load_into_module(bundle, policy)
    policy.eval()
    report = evaluate_mse(
        policy,
        demos,
        input_size=input_size,
        batch_size=batch_size,
        task=task,
        init_mode=bundle.meta.init_from,
        run_id=checkpoint_id(checkpoint),
    )
    if out is not None:
        report.to_json(out)
        click.echo(f"report: {out}")
    click.echo(f"task={report.task} init={report.init_mode} "
               f"mse={report.mse:.6f} over {report.n_transitions} transitions")


@cli.command()
@click.option("--kind", required=True, type=click.Choice(["layers", "play_fraction", "demo_count"]))
@click.option("--values", required=True, help="Comma-separated grid values, e.g. 3,4,5 or 0.25,0.5,1.0.")
@click.option("--seeds", default="0", show_default=True, help="Comma-separated seeds.")
@click.option("--play-root", required=True, type=click.Path(path_type=Path))
@click.option("--demos-root", required=True, type=click.Path(path_type=Path))
@click.option("--heldout-root", required=True, type=click.Path(path_type=Path))
@click.option("--task", default="push", show_default=True)
@click.option("--pretrain-config", type=click.Path(path_type=Path), default=None)
@click.option("--bc-config", type=click.Path(path_type=Path), default=None)
@click.option("--out", required=True, type=click.Path(path_type=Path), help="Output CSV path.")
@click.option("--runs-dir", type=click.Path(path_type=Path), default=None)
@click.option("--force", is_flag=True)
@guarded
def ablate(kind: str, values: str, seeds: str, play_root: Path, demos_root: Path,
           heldout_root: Path, task: str, pretrain_config: Path | None, bc_config: Path | None,
           out: Path, runs_dir: Path | None, force: bool) -> None:
    """Sweep encoder depth, play-data fraction, or demonstration count."""
    runs_dir = Path(runs_dir) if runs_dir is not None else default_runs_dir()
    grid = [float(v) for v in values.split(",") if v.strip()]
    seed_list = [int(s) for s in seeds.split(",") if s.strip()]

    p_raw = load_yaml_config(pretrain_config) if pretrain_config is not None else {}
    b_raw = load_yaml_config(bc_config) if bc_config is not None else {}
    b_raw.setdefault("task", task)
    p_cfg = pretrain_config_from_dict(p_raw)
    b_cfg = bc_config_from_dict(b_raw)

    play = load_play_dataset(resolve_data_path(play_root))
    demos = load_demo_dataset(resolve_data_path(demos_root), task=b_cfg.task)
    heldout = load_demo_dataset(resolve_data_path(heldout_root), task=b_cfg.task)

    data_id = ";".join(
        _dataset_identity(d.manifest) for d in (play, demos, heldout)
    )
    run_id = compute_run_id(
        f"ablate:{kind}",
        {"grid": grid, "seeds": seed_list, "pretrain": p_cfg.to_dict(), "bc": b_cfg.to_dict()},
        data_id,
    )
    _check_rerun(runs_dir, run_id, force)

    rows = run_ablation(kind, grid, seed_list, play, demos, heldout, p_cfg, b_cfg)
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_ablation_csv(rows, out)
    _register(runs_dir, f"ablate:{kind}", run_id, seed_list[0],
              {"grid": grid, "seeds": seed_list}, data_id, [out])
    click.echo(f"run {run_id}: {len(rows)} grid points -> {out}")


@cli.command("import-weights")
@click.option("--src", required=True, type=click.Path(path_type=Path),
              help="External weights (.npz, or a torch state-dict file).")
@click.option("--name-map", type=click.Path(path_type=Path), default=None,
              help="JSON mapping of external parameter names to conv1..conv5 keys.")
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--source-dataset", default="external-classification", show_default=True)
@guarded
def import_weights(src: Path, name_map: Path | None, out: Path, source_dataset: str) -> None:
    """Convert externally trained classification weights into a checkpoint."""
    mapping = load_name_map(name_map) if name_map is not None else None
    bundle = convert_external_weights(src, name_map=mapping, source_dataset=source_dataset)
    out.parent.mkdir(parents=True, exist_ok=True)
    digest = save_checkpoint(bundle, out)
    click.echo(f"imported {len(bundle.arrays)} arrays "
               f"(depth {bundle.meta.pretrain_depth}) -> {out} [{digest[:16]}]")


@cli.command()
@click.argument("reports", nargs=-1, required=True,
                type=click.Path(path_type=Path, exists=True))
@click.option("--ablation-csv", "ablation_csvs", multiple=True,
              type=click.Path(path_type=Path, exists=True),
              help="Also summarize ablation CSVs (median per grid value).")
@click.option("--out-csv", type=click.Path(path_type=Path), default=None)
@guarded
def report(reports: tuple[Path, ...], ablation_csvs: tuple[Path, ...],
           out_csv: Path | None) -> None:
    """Compile evaluation reports into the task x initialization table."""
    records = []
    for path in reports:
        r = EvalReport.from_json(path)
        records.append(ResultRecord(task=r.task, init_mode=r.init_mode, mse=r.mse, run_id=r.run_id))
    table = compile_results_table(records)
    click.echo(table.to_markdown())
    if table.missing:
        click.echo(f"missing cells: {', '.join(f'{t}/{m}' for t, m in table.missing)}")
    if out_csv is not None:
        table.write_csv(out_csv)
        click.echo(f"csv: {out_csv}")
    for path in ablation_csvs:
        rows = read_ablation_csv(path)
        medians = median_by_value(rows)
        kind = rows[0].kind if rows else "?"
        click.echo(f"\nablation {kind} ({path}):")
        for value, med in medians.items():
            click.echo(f"  {value:g}: median mse {med:.6f}")


if __name__ == "__main__":
    cli()

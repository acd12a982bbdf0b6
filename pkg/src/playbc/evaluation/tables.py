"""Compiling per-run evaluation results into the task x init-mode table."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from playbc.bc.train import InitMode
from playbc.errors import ConflictError

MODE_ORDER = [m.value for m in InitMode]
MISSING = "-"


@dataclass(frozen=True)
class ResultRecord:
    task: str
    init_mode: str
    mse: float
    run_id: str

    def __post_init__(self):
        if self.init_mode not in MODE_ORDER:
            raise ValueError(f"unknown init_mode {self.init_mode!r}")


@dataclass
class ResultsTable:
    tasks: list[str]
    modes: list[str]
    cells: dict[tuple[str, str], ResultRecord]

    @property
    def missing(self) -> list[tuple[str, str]]:
        return [(t, m) for t in self.tasks for m in self.modes if (t, m) not in self.cells]

    def mse(self, task: str, mode: str) -> float:
        return self.cells[(task, mode)].mse

    def to_csv(self) -> str:
        lines = ["task," + ",".join(self.modes)]
        for t in self.tasks:
            row = [t]
            for m in self.modes:
                rec = self.cells.get((t, m))
                row.append(MISSING if rec is None else f"{rec.mse:.6g}")
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        head = "| task | " + " | ".join(self.modes) + " |"
        sep = "|" + "---|" * (len(self.modes) + 1)
        rows = []
        for t in self.tasks:
            cells = [
                MISSING if (t, m) not in self.cells else f"{self.cells[(t, m)].mse:.4f}"
                for m in self.modes
            ]
            rows.append("| " + t + " | " + " | ".join(cells) + " |")
        return "\n".join([head, sep, *rows]) + "\n"

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.to_csv(), encoding="utf-8")
        return path


def compile_results_table(
    records: list[ResultRecord],
    tasks: list[str] | None = None,
    modes: list[str] | None = None,
) -> ResultsTable:
    """Arrange one record per (task, init_mode) cell.

    Tasks default to the sorted set present in the records; modes default to
    the canonical nine-mode order. Exact duplicates collapse silently;
    records that disagree on a cell raise ConflictError naming both run ids.
    Absent cells stay empty and are listed in `missing`.
    """
    modes = list(modes) if modes is not None else list(MODE_ORDER)
    tasks = list(tasks) if tasks is not None else sorted({r.task for r in records})
    cells: dict[tuple[str, str], ResultRecord] = {}
    for rec in records:
        if rec.task not in tasks or rec.init_mode not in modes:
            continue
        key = (rec.task, rec.init_mode)
        prev = cells.get(key)
        if prev is None:
            cells[key] = rec
        elif prev != rec:
            raise ConflictError(
                f"conflicting results for task={rec.task!r} init_mode={rec.init_mode!r}: "
                f"run {prev.run_id} reports {prev.mse:.6g}, run {rec.run_id} reports {rec.mse:.6g}"
            )
    return ResultsTable(tasks=tasks, modes=modes, cells=cells)

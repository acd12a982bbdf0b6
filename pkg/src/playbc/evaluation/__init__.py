from playbc.evaluation.ablations import (
    ABLATION_KINDS,
    AblationRow,
    ablation_csv,
    median_by_value,
    read_ablation_csv,
    run_ablation,
    split_fingerprint,
    write_ablation_csv,
)
from playbc.evaluation.evaluate import EvalReport, evaluate_mse
from playbc.evaluation.overlay import render_action_overlay, render_overlay_strip
from playbc.evaluation.tables import (
    MODE_ORDER,
    ResultRecord,
    ResultsTable,
    compile_results_table,
)

__all__ = [
    "ABLATION_KINDS",
    "AblationRow",
    "EvalReport",
    "MODE_ORDER",
    "ResultRecord",
    "ResultsTable",
    "ablation_csv",
    "compile_results_table",
    "evaluate_mse",
    "median_by_value",
    "read_ablation_csv",
    "render_action_overlay",
    "render_overlay_strip",
    "run_ablation",
    "split_fingerprint",
    "write_ablation_csv",
]

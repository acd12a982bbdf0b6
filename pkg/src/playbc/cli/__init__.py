from playbc.cli.configio import (
    bc_config_from_dict,
    default_runs_dir,
    load_yaml_config,
    pretrain_config_from_dict,
    resolve_data_path,
)
from playbc.cli.registry import (
    RunRecord,
    append_run,
    compute_run_id,
    find_run,
    read_registry,
    registry_path,
)

__all__ = [
    "RunRecord",
    "append_run",
    "bc_config_from_dict",
    "compute_run_id",
    "default_runs_dir",
    "find_run",
    "load_yaml_config",
    "pretrain_config_from_dict",
    "read_registry",
    "registry_path",
    "resolve_data_path",
]

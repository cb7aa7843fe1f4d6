import os
from pathlib import Path

_data = Path(__file__).with_name("data")
if _data.is_dir():
    os.environ.setdefault("EFFBUDGET_DATA", str(_data))

from ._core import (  # noqa: E402
    EffbudgetError,
    Instance,
    export_mps,
    load,
    scenarios,
    simulate,
    solve,
    stage1,
    sweep_csv,
)

__all__ = [
    "EffbudgetError",
    "Instance",
    "export_mps",
    "load",
    "scenarios",
    "simulate",
    "solve",
    "stage1",
    "sweep_csv",
]

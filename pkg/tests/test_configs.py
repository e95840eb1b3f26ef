import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from bowtie_mech.cli import main
from bowtie_mech.verify import SUITES

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
RUNS = sorted(p for p in CONFIGS.glob("*.json") if p.name not in ("acceptance.json", "sl2c_structure.json"))


def test_acceptance_map_is_complete():
    acc = json.loads((CONFIGS / "acceptance.json").read_text())
    names = {n for n, _, _ in SUITES}
    assert sorted(int(k) for k in acc["criteria"]) == list(range(1, 12))
    for entry in acc["criteria"].values():
        assert entry["suite"] in names
        assert entry["command"].endswith(entry["suite"])
        if "run" in entry:
            assert (CONFIGS / entry["run"]).is_file()


@pytest.mark.parametrize("path", RUNS, ids=lambda p: p.stem)
def test_shipped_config_runs(path, tmp_path, monkeypatch):
    # structure references resolve next to the config, outputs under the working directory
    for p in CONFIGS.glob("*.json"):
        shutil.copy(p, tmp_path / p.name)
    monkeypatch.chdir(tmp_path)
    assert main(["run", path.name]) == 0
    cfg = json.loads(path.read_text())
    meta = json.loads(Path(cfg["output"] + ".meta.json").read_text())
    step, t_end = cfg["integrator"]["step"], cfg["integrator"]["t_end"]
    assert meta["rows"] == int(np.floor(t_end / step + 1e-9)) + 1
    assert meta["energy_drift"] < 1e-8

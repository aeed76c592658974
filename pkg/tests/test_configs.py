import glob
import os

import pytest

from swaptest.harness import ExperimentConfig

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


@pytest.mark.parametrize("path", sorted(glob.glob(os.path.join(CONFIG_DIR, "*.json"))))
def test_shipped_configs_parse(path):
    cfg = ExperimentConfig.from_json(path)
    assert cfg.replicates >= 300 and cfg.output

from pathlib import Path

import pytest
import yaml

CALIBRATION = Path(__file__).parent.joinpath("resources/calibration.yaml")


def pytest_addoption(parser):
    parser.addoption(
        "--big",
        action="store_true",
        default=False,
        help="Also run the long-running experiments up to x = 10^7.",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--big"):
        return
    skip_big = pytest.mark.skip(reason="long-running, enable with --big")
    for item in items:
        if "big" in item.keywords:
            item.add_marker(skip_big)


@pytest.fixture(scope="session")
def calibration():
    with open(CALIBRATION) as calibration_fp:
        return yaml.load(calibration_fp, Loader=yaml.FullLoader)

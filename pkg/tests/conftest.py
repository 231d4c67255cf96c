import json
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())
ACCEPTANCE_LINES: dict = {}


@pytest.fixture(scope="session")
def frozen():
    return FROZEN


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (len(k), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


GAUSSIAN_CFG = """\
potential: {family: gaussian-well, depth: -2.0, width: 1.0}
window: {a: -0.5, b: 0.5}
regime: {mode: semiclassical, h: 0.3}
"""


@pytest.fixture(scope="session")
def count_all_h02(tmp_path_factory):
    """CLI ``count --method all`` at h = 0.2 (shared: the Feshbach solve takes ~1.5 min)."""
    import csv
    import io
    from contextlib import redirect_stdout

    from landau_weyl.cli import main

    d = tmp_path_factory.mktemp("count")
    cfg = d / "cfg.yaml"
    cfg.write_text(GAUSSIAN_CFG)
    out = d / "count.csv"
    buf = io.StringIO()
    with redirect_stdout(buf):
        rc = main(["count", "--config", str(cfg), "--h", "0.2", "--method", "all", "--out", str(out)])
    rows = list(csv.reader(line for line in out.read_text().splitlines() if not line.startswith("#")))
    counts = {r[0]: int(r[1]) for r in rows[1:]}
    return rc, buf.getvalue().strip(), counts
